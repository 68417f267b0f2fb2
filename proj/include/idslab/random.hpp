#pragma once

// i.i.d. site colorings, Monte Carlo for the localized trace per unit volume,
// and per-sample comparison with finite-volume counting functions.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "idslab/ergodic.hpp"
#include "idslab/lattice.hpp"
#include "idslab/operator.hpp"
#include "idslab/parallel.hpp"
#include "idslab/spectral.hpp"

namespace idslab {

struct SiteDistribution {
  std::vector<std::string> alphabet;
  std::vector<double> weights;
  std::uint64_t seed = 0;
  int dim = 1;

  void validate() const {
    check_dimension(dim);
    if (alphabet.empty() || weights.size() != alphabet.size()) {
      throw std::invalid_argument("one weight per alphabet symbol required");
    }
    double s = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be nonnegative");
      s += w;
    }
    if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1 within 1e-12");
  }

  /// Index of the symbol carrying all the mass, or -1.
  int point_mass() const {
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] == 1.0) return static_cast<int>(i);
    return -1;
  }

  std::string describe() const {
    std::string s = "iid(";
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
      if (i) s += ",";
      s += alphabet[i] + ":" + std::to_string(weights[i]);
    }
    return s + ";seed=" + std::to_string(seed) + ")";
  }
};

inline std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Color at x is a pure function of (seed, index, x).
inline Coloring sample_coloring(const SiteDistribution& dist, std::uint64_t index) {
  dist.validate();
  if (const int k = dist.point_mass(); k >= 0) {
    return Coloring::constant(dist.dim, dist.alphabet, ColorId{static_cast<std::uint32_t>(k)});
  }
  return Coloring::pseudorandom(dist.dim, dist.alphabet, dist.weights, sample_seed(dist.seed, index));
}

/// Box C_{2R+1} shifted so that cell 0 sits in the middle.
inline FiniteSet centered_box(int R, int d) {
  if (R < 1) throw std::invalid_argument("truncation radius R must be >= 1 so that W_0 is interior");
  Site shift;
  for (int i = 0; i < d; ++i) shift[i] = -R;
  return cube(2 * R + 1, d).translated(shift);
}

/// Eigenvalues of H on the box and the weight ∫_{W_0}|ψ_k|² of each eigenvector.
struct LocalizedSpectrum {
  std::vector<double> energies;
  std::vector<double> weights;
};

inline LocalizedSpectrum localized_spectrum(const Coloring& C, const BackendParams& params, int R) {
  const int d = C.dim();
  OperatorSpec spec{centered_box(R, d), params.resolution, C, params.backend, params.prototypes, {}};
  if (operator_dimension(spec) > params.dimension_cap) throw std::length_error("box operator exceeds dimension cap");
  const HermitianMatrix H = discretize(spec);
  const EigenPairs ep = eigenpairs(H);
  std::vector<Eigen::Index> own;
  for (std::size_t i = 0; i < H.basis().size(); ++i) {
    const Site& g = H.basis()[i];
    const Site cell = (params.backend == Backend::lattice) ? g : detail::owner_cell(g, params.resolution, d);
    if (cell == Site()) own.push_back(static_cast<Eigen::Index>(i));
  }
  LocalizedSpectrum out;
  for (Eigen::Index k = 0; k < ep.values.size(); ++k) {
    double w = 0.0;
    for (Eigen::Index i : own) w += ep.weight(i, k);
    out.energies.push_back(ep.values[k]);
    out.weights.push_back(w);
  }
  return out;
}

/// λ ↦ Σ_{E_k <= λ} w_k on a grid.
inline std::vector<double> localized_trace(const LocalizedSpectrum& s, const std::vector<double>& grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  std::size_t k = 0;
  double acc = 0.0;
  for (double lambda : grid) {
    while (k < s.energies.size() && s.energies[k] <= lambda) acc += s.weights[k++];
    out.push_back(acc);
  }
  return out;
}

/// Σ_k e^{-t E_k} w_k.
inline double localized_heat_trace(const LocalizedSpectrum& s, double t) {
  double acc = 0.0;
  for (std::size_t k = 0; k < s.energies.size(); ++k) acc += std::exp(-t * s.energies[k]) * s.weights[k];
  return acc;
}

struct McEstimate {
  std::vector<double> grid;
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::size_t samples = 0;
  int R = 0;
  std::string distribution;

  /// Piecewise constant in λ: mean[i] on [grid[i], grid[i+1]).
  StepFunction to_step_function() const {
    std::vector<double> b;
    std::vector<double> v{0.0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      b.push_back(grid[i]);
      v.push_back(mean[i]);
    }
    return StepFunction(std::move(b), std::move(v));
  }

  void write_csv(std::ostream& os) const {
    os.precision(17);
    os << "# distribution=" << distribution << " S=" << samples << " R=" << R << "\n";
    os << "lambda,mean,stderr,S,R\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      os << grid[i] << "," << mean[i] << "," << stderr_[i] << "," << samples << "," << R << "\n";
  }
};

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(lo < hi)) throw std::invalid_argument("grid needs lo < hi and at least two points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

/// Sample indices first_index .. first_index + S - 1.
inline McEstimate pastur_shubin_mc(const SiteDistribution& dist, const BackendParams& params, const std::vector<double>& grid,
                                   std::size_t S, int R, std::uint64_t first_index = 0, const Scheduler& sched = {}) {
  dist.validate();
  if (S < 1) throw std::invalid_argument("sample count S must be >= 1");
  if (R < 1) throw std::invalid_argument("truncation radius R must be >= 1 so that W_0 is interior");
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("lambda grid must be sorted");
  const auto per_sample = parallel_map(S, sched, [&](std::size_t s) {
    return localized_trace(localized_spectrum(sample_coloring(dist, first_index + s), params, R), grid);
  });
  McEstimate est;
  est.grid = grid;
  est.samples = S;
  est.R = R;
  est.distribution = dist.describe();
  std::vector<double> column(S);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t s = 0; s < S; ++s) column[s] = per_sample[s][i];
    const double m = pairwise_sum(column.data(), S) / static_cast<double>(S);
    for (std::size_t s = 0; s < S; ++s) column[s] = (per_sample[s][i] - m) * (per_sample[s][i] - m);
    const double var = (S > 1) ? pairwise_sum(column.data(), S) / static_cast<double>(S - 1) : 0.0;
    est.mean.push_back(m);
    est.stderr_.push_back(std::sqrt(var / static_cast<double>(S)));
  }
  return est;
}

struct RandomComparison {
  std::vector<int> js;
  std::vector<std::uint64_t> omegas;
  std::vector<std::vector<double>> distance;    // [omega][j] against the Monte Carlo N
  std::vector<std::vector<StepFunction>> direct;  // [omega][j]
  std::vector<double> pair_spread;              // ‖ω_0 − ω_1‖ per j, when two or more ω

  bool decreases(std::size_t w) const { return distance[w].back() < distance[w].front(); }
};

/// Per sampled ω, the direct route on C_j against a reference estimate of N.
inline RandomComparison compare_random_ids(const SiteDistribution& dist, const BackendParams& params,
                                           const std::vector<int>& js, const EnergyWindow& I,
                                           const std::vector<std::uint64_t>& omegas, const StepFunction& reference,
                                           const Scheduler& sched = {}) {
  dist.validate();
  if (js.empty() || omegas.empty()) throw std::invalid_argument("need at least one j and one sample");
  RandomComparison rep;
  rep.js = js;
  rep.omegas = omegas;
  std::vector<FiniteSet> seq;
  for (int j : js) seq.push_back(cube(j, dist.dim));
  for (std::uint64_t w : omegas) {
    const auto F = counting_field(sample_coloring(dist, w), params, I);
    auto route = direct_route(F, seq, sched);
    std::vector<double> dist_w;
    for (const auto& f : route.normalized) dist_w.push_back(lp_distance(f, reference, I));
    rep.distance.push_back(std::move(dist_w));
    rep.direct.push_back(std::move(route.normalized));
  }
  if (omegas.size() >= 2) {
    for (std::size_t j = 0; j < js.size(); ++j) rep.pair_spread.push_back(lp_distance(rep.direct[0][j], rep.direct[1][j], I));
  }
  return rep;
}

}  // namespace idslab
