#pragma once

// Almost-additive set functions with values in L^p(I): boundary terms, the
// additivity defect, the direct and pattern-frequency approximation routes,
// and the quantitative error bound of the ergodic theorem.

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "idslab/lattice.hpp"
#include "idslab/operator.hpp"
#include "idslab/parallel.hpp"
#include "idslab/spectral.hpp"

namespace idslab {

/// b(Q) = d·C̃·♯∂Q over the inner combinatorial boundary; b(Q) <= D♯Q with D = d·C̃.
struct BoundaryTerm {
  int dim = 1;
  double scale = 0.0;  // C̃

  double operator()(const FiniteSet& Q) const {
    return dim * scale * static_cast<double>(inner_boundary(Q, 1).size());
  }
  double D() const { return dim * scale; }
};

/// Cache of F̃ keyed by canonical pattern. Readers share; a key is written once.
class PatternCache {
 public:
  template <class Fn>
  StepFunction get_or_compute(const Pattern& canonical, Fn&& compute) {
    {
      std::lock_guard lock(mu_);
      if (auto it = map_.find(canonical); it != map_.end()) return it->second;
    }
    StepFunction v = compute();
    std::lock_guard lock(mu_);
    return map_.try_emplace(canonical, std::move(v)).first->second;
  }
  std::size_t size() const {
    std::lock_guard lock(mu_);
    return map_.size();
  }

 private:
  mutable std::mutex mu_;
  std::map<Pattern, StepFunction> map_;
};

/// F: finite sets -> L^p(I). The evaluator acts on patterns, so F(Q) = F̃(C|_Q)
/// and invariance only needs translation invariance of the evaluator.
class AlmostAdditiveField {
 public:
  using Evaluator = std::function<StepFunction(const Pattern&)>;

  AlmostAdditiveField(Coloring C, Evaluator eval, EnergyWindow window, BoundaryTerm b, double K)
      : coloring_(std::move(C)), eval_(std::move(eval)), window_(window), boundary_(b), K_(K) {}

  StepFunction operator()(const FiniteSet& Q) const { return eval_(restrict(coloring_, Q)); }
  StepFunction evaluate_pattern(const Pattern& P) const { return eval_(P); }

  const Coloring& coloring() const { return coloring_; }
  const EnergyWindow& window() const { return window_; }
  const BoundaryTerm& boundary() const { return boundary_; }
  double K() const { return K_; }

  AlmostAdditiveField with_constants(BoundaryTerm b, double K) const {
    AlmostAdditiveField f = *this;
    f.boundary_ = b;
    f.K_ = K;
    return f;
  }
  AlmostAdditiveField with_coloring(Coloring C) const {
    AlmostAdditiveField f = *this;
    f.coloring_ = std::move(C);
    return f;
  }

 private:
  Coloring coloring_;
  Evaluator eval_;
  EnergyWindow window_;
  BoundaryTerm boundary_;
  double K_;
};

struct BackendParams {
  Backend backend = Backend::lattice;
  int resolution = 8;
  std::shared_ptr<const PrototypeLibrary> prototypes;
  std::size_t dimension_cap = 3000;
};

/// Operator spec on D(P) colored by P (colors outside D(P) never enter).
inline OperatorSpec pattern_operator(const Pattern& P, const std::vector<std::string>& alphabet,
                                     const BackendParams& params) {
  std::map<Site, ColorId> colors;
  for (std::size_t i = 0; i < P.size(); ++i) colors[P.domain().sites()[i]] = P.colors()[i];
  const ColorId background = P.size() ? P.colors().front() : ColorId{0};
  return OperatorSpec{P.domain(), params.resolution, Coloring::window(P.dim(), alphabet, std::move(colors), background),
                      params.backend, params.prototypes, {}};
}

/// Q ↦ N(·, H^Q) restricted to the window, as an almost-additive field.
inline AlmostAdditiveField counting_field(const Coloring& C, const BackendParams& params, const EnergyWindow& I,
                                          double boundary_scale = 0.0, double K = 0.0) {
  if (!params.prototypes) throw std::invalid_argument("counting field needs a prototype library");
  for (const auto& name : C.alphabet())
    if (!params.prototypes->contains(name)) throw std::invalid_argument("missing prototype for symbol '" + name + "'");
  auto alphabet = C.alphabet();
  auto eval = [alphabet, params, I](const Pattern& P) {
    const OperatorSpec spec = pattern_operator(P, alphabet, params);
    const std::size_t dim = operator_dimension(spec);
    if (dim > params.dimension_cap) {
      throw std::length_error("operator dimension " + std::to_string(dim) + " exceeds cap " +
                              std::to_string(params.dimension_cap));
    }
    return counting_function(eigenvalues(discretize(spec), I.hi), I);
  };
  return AlmostAdditiveField(C, std::move(eval), I, BoundaryTerm{C.dim(), boundary_scale}, K);
}

struct AdditivityDefect {
  double defect = 0.0;
  double budget = 0.0;
  bool within_budget() const { return defect <= budget; }
};

/// ‖F(∪Q_k) − Σ F(Q_k)‖ against Σ b(Q_k).
inline AdditivityDefect additivity_defect(const AlmostAdditiveField& F, std::span<const FiniteSet> partition) {
  if (partition.empty()) throw std::invalid_argument("empty partition");
  std::vector<Site> all;
  std::size_t total = 0;
  for (const auto& Q : partition) {
    all.insert(all.end(), Q.begin(), Q.end());
    total += Q.size();
  }
  const FiniteSet U(partition.front().dim(), std::move(all));
  if (U.size() != total) throw std::invalid_argument("partition sets overlap");
  StepFunction sum(0.0);
  double budget = 0.0;
  for (const auto& Q : partition) {
    sum = sum + F(Q);
    budget += F.boundary()(Q);
  }
  return {lp_distance(F(U), sum, F.window()), budget};
}

struct DirectRoute {
  std::vector<StepFunction> normalized;  // F(U_j)/♯U_j
  std::vector<double> cauchy;            // ‖F(U_{j+1})/♯U_{j+1} − F(U_j)/♯U_j‖
};

inline DirectRoute direct_route(const AlmostAdditiveField& F, std::span<const FiniteSet> sequence,
                                const Scheduler& sched = {}) {
  if (sequence.empty()) throw std::invalid_argument("empty van Hove sequence");
  if (sequence.size() >= 2 && !van_hove_ratios(sequence, 1).monotone_tail) {
    throw std::invalid_argument("sequence fails the van Hove ratio sanity check");
  }
  DirectRoute r;
  r.normalized = parallel_map(sequence.size(), sched, [&](std::size_t j) {
    return scale(F(sequence[j]), 1.0 / static_cast<double>(sequence[j].size()));
  });
  for (std::size_t j = 1; j < r.normalized.size(); ++j) {
    r.cauchy.push_back(lp_distance(r.normalized[j], r.normalized[j - 1], F.window()));
  }
  return r;
}

/// Σ_P ν_P F̃(P)/♯C_M. If `occurring` is given, each of its patterns must
/// have a tabulated frequency.
inline StepFunction pattern_route(const AlmostAdditiveField& F, const FrequencyTable& table,
                                  PatternCache* cache = nullptr, const PatternTally* occurring = nullptr,
                                  const Scheduler& sched = {}) {
  if (occurring) {
    for (const auto& [P, k] : *occurring) {
      if (k > 0 && !table.entries.contains(P.canonical())) {
        throw std::invalid_argument("missing frequency for an occurring pattern");
      }
    }
  }
  std::vector<std::pair<Pattern, double>> terms;
  for (const auto& [P, v] : table.entries) {
    const double nu = frequency_value(v);
    if (nu != 0.0) terms.emplace_back(P.canonical(), nu);
  }
  const auto values = parallel_map(terms.size(), sched, [&](std::size_t i) {
    const Pattern& P = terms[i].first;
    if (cache) return cache->get_or_compute(P, [&] { return F.evaluate_pattern(P); });
    return F.evaluate_pattern(P);
  });
  const double volume = std::pow(static_cast<double>(table.M), F.coloring().dim());
  StepFunction sum(0.0);
  for (std::size_t i = 0; i < terms.size(); ++i) sum = sum + values[i].map([&](double x) { return x * terms[i].second; });
  return sum.map([volume](double x) { return x / volume; });
}

/// Constants of the IDS form of the bound.
struct IdsBoundConstants {
  double C = 1.0;
  double c_pd = 1.0;
  double T = 1.0;
  double p = 2.0;
  int d = 1;
};

/// C/M + (C(T+C)^{d/2} + c_{p,d} C^{1/p}) r + C(T+C)^{d/2} Σdev.
inline double error_bound(int M, double boundary_ratio, double deviation_sum, const IdsBoundConstants& k) {
  if (M < 1 || boundary_ratio < 0.0 || deviation_sum < 0.0) throw std::invalid_argument("error bound inputs must be nonnegative");
  if (!(k.C > 0.0) || !(k.c_pd > 0.0) || !(k.p >= 1.0)) throw std::invalid_argument("error bound constants must be positive");
  const double weyl = k.C * std::pow(k.T + k.C, k.d / 2.0);
  return k.C / M + (weyl + k.c_pd * std::pow(k.C, 1.0 / k.p)) * boundary_ratio + weyl * deviation_sum;
}

/// Constants of the almost-additive form of the bound.
struct ErgodicBoundConstants {
  double K = 1.0;
  double D = 1.0;
  double b_CM = 0.0;  // b(C_M)
  int d = 1;
};

/// 2 b(C_M)/M^d + (K+D) r + K Σdev.
inline double error_bound(int M, double boundary_ratio, double deviation_sum, const ErgodicBoundConstants& k) {
  if (M < 1 || boundary_ratio < 0.0 || deviation_sum < 0.0) throw std::invalid_argument("error bound inputs must be nonnegative");
  return 2.0 * k.b_CM / std::pow(static_cast<double>(M), k.d) + (k.K + k.D) * boundary_ratio + k.K * deviation_sum;
}

/// K = C3 (T + C1)^{d/2}, C3 fitted so that ‖F(single cell)‖ <= K for every symbol.
struct UniformBoundFit {
  double C3 = 0.0;
  double K = 0.0;
};

inline UniformBoundFit fit_uniform_bound(const AlmostAdditiveField& F, double C1) {
  const int d = F.coloring().dim();
  const double T = F.window().hi;
  const double weyl = std::pow(T + C1, d / 2.0);
  if (!(weyl > 0.0)) throw std::invalid_argument("T + C1 must be positive");
  double worst = 0.0;
  for (std::size_t c = 0; c < F.coloring().alphabet().size(); ++c) {
    const Pattern single(FiniteSet(d, {Site()}), {ColorId{static_cast<std::uint32_t>(c)}});
    worst = std::max(worst, lp_norm(F.evaluate_pattern(single), F.window()));
  }
  return {worst / weyl, worst};
}

struct RouteComparison {
  int j = 0;
  int M = 0;
  double distance = 0.0;
  double boundary_ratio = 0.0;
  double deviation_sum = 0.0;
  double bound = 0.0;
};

struct ErgodicReport {
  EnergyWindow window;
  std::vector<int> js;
  std::vector<StepFunction> direct;
  std::vector<double> cauchy;
  std::vector<int> Ms;
  std::vector<StepFunction> pattern;
  std::vector<RouteComparison> comparisons;
  double K = 0.0;
  double D = 0.0;
  double C_tilde = 0.0;
};

/// Both routes for U_j = C_j and every M, with the bound per (j, M).
inline ErgodicReport compare_routes(const AlmostAdditiveField& F, const std::vector<int>& js, const std::vector<int>& Ms,
                                    const Scheduler& sched = {}) {
  if (Ms.empty()) throw std::invalid_argument("M list must not be empty");
  if (js.empty()) throw std::invalid_argument("j list must not be empty");
  const int d = F.coloring().dim();
  ErgodicReport rep;
  rep.window = F.window();
  rep.js = js;
  rep.Ms = Ms;
  rep.K = F.K();
  rep.D = F.boundary().D();
  rep.C_tilde = F.boundary().scale;
  std::vector<FiniteSet> seq;
  for (int j : js) seq.push_back(cube(j, d));
  auto direct = direct_route(F, seq, sched);
  rep.direct = std::move(direct.normalized);
  rep.cauchy = std::move(direct.cauchy);
  PatternCache cache;
  std::vector<FrequencyTable> tables;
  for (int M : Ms) {
    tables.push_back(F.coloring().is_periodic() ? exact_frequency_table(F.coloring(), M)
                                                : estimated_frequency_table(F.coloring(), seq.back(), M));
    rep.pattern.push_back(pattern_route(F, tables.back(), &cache, nullptr, sched));
  }
  for (std::size_t a = 0; a < js.size(); ++a) {
    for (std::size_t b = 0; b < Ms.size(); ++b) {
      RouteComparison c;
      c.j = js[a];
      c.M = Ms[b];
      c.distance = lp_distance(rep.direct[a], rep.pattern[b], F.window());
      c.boundary_ratio = static_cast<double>(boundary(seq[a], Ms[b]).size()) / static_cast<double>(seq[a].size());
      c.deviation_sum = frequency_deviation_sum(F.coloring(), seq[a], tables[b]);
      const ErgodicBoundConstants k{F.K(), F.boundary().D(), F.boundary()(cube(Ms[b], d)), d};
      c.bound = error_bound(Ms[b], c.boundary_ratio, c.deviation_sum, k);
      rep.comparisons.push_back(c);
    }
  }
  return rep;
}

}  // namespace idslab
