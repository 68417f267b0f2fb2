#pragma once

// Subcommands of the batch driver. Each writes its data files under the
// output directory and returns their names; run() adds manifest.json.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "idslab/config.hpp"
#include "idslab/ergodic.hpp"
#include "idslab/io.hpp"
#include "idslab/random.hpp"
#include "idslab/ssf.hpp"

namespace idslab {

/// A numerical invariant failed; data files were still written.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Calibration {
  double C_tilde = 0.0;
  std::string method;
  FacetExperiment experiment;
};

/// Facet across the middle of C_L along axis 0.
inline std::pair<OperatorSpec, OperatorSpec> middle_facet_pair(const Coloring& C, const BackendParams& params, int L) {
  OperatorSpec A{cube(L, C.dim()), params.resolution, C, params.backend, params.prototypes, {}};
  Site anchor;
  anchor[0] = L / 2;
  OperatorSpec B = add_facet_dirichlet(A, Facet{anchor, 0});
  return {std::move(A), std::move(B)};
}

/// C̃ from one facet: the decay-law constant when the fit succeeds, the
/// direct singular-value sum otherwise.
inline Calibration calibrate_boundary_scale(const Coloring& C, const BackendParams& params, int L, const EnergyWindow& I,
                                            double floor = 1e-13) {
  auto [A, B] = middle_facet_pair(C, params, L);
  Calibration cal;
  cal.experiment = run_facet_experiment("calibration", A, B, I, {I.p}, params.dimension_cap, floor);
  if (cal.experiment.fit && cal.experiment.fit->c_hat > 0.0) {
    const auto& f = *cal.experiment.fit;
    cal.C_tilde = ssf_bound_constant(f.C2_inflated, f.c_hat, C.dim(), I.p, I.hi);
    cal.method = "decay-law";
  } else {
    cal.C_tilde = std::pow(hs_bound(cal.experiment.series, ConvexGauge::monomial(I.p), I.hi).value, 1.0 / I.p);
    cal.method = "singular-value-sum";
  }
  return cal;
}

inline std::vector<std::string> run_patterns(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const Coloring C = cfg.make_coloring();
  const auto alpha = C.alphabet();
  std::vector<std::string> files;
  for (int M : cfg.Ms) {
    FrequencyTable t;
    std::string mode;
    if (C.is_periodic()) {
      t = exact_frequency_table(C, M);
      mode = "exact-periodic";
    } else {
      t = estimated_frequency_table(C, cube(cfg.js.back(), cfg.dim), M);
      mode = "estimate-along C_" + std::to_string(cfg.js.back());
    }
    Json j = to_json(t, alpha);
    j["mode"] = mode;
    j["coloring"] = C.describe();
    const std::string name = "patterns_M" + std::to_string(M) + ".json";
    write_json(out / name, j);
    files.push_back(name);
    log << "M=" << M << ": " << t.entries.size() << " pattern classes (" << mode << ")\n";
  }
  return files;
}

inline std::vector<std::string> run_ids(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const Coloring C = cfg.make_coloring();
  const BackendParams params = cfg.backend_params();
  const Calibration cal = calibrate_boundary_scale(C, params, cfg.ssf.cells, cfg.window, cfg.ssf.floor);
  auto F = counting_field(C, params, cfg.window, cal.C_tilde);
  const UniformBoundFit kfit = fit_uniform_bound(F, cfg.C1);
  F = F.with_constants(F.boundary(), kfit.K);
  const ErgodicReport rep = compare_routes(F, cfg.js, cfg.Ms, cfg.scheduler());

  Json j = to_json(rep);
  j["calibration"] = {{"method", cal.method}, {"C_tilde", cal.C_tilde}, {"C3", kfit.C3}};
  const IdsBoundConstants ids{cfg.C, cfg.c_pd, cfg.window.hi, cfg.window.p, cfg.dim};
  for (auto& c : j["comparisons"]) {
    c["bound_ids_form"] = error_bound(c["M"].get<int>(), c["boundary_ratio"].get<double>(), c["deviation_sum"].get<double>(), ids);
  }
  std::vector<std::string> files{"ids_report.json"};
  write_json(out / files[0], j);
  for (std::size_t a = 0; a < rep.js.size(); ++a) {
    const std::string name = "direct_j" + std::to_string(rep.js[a]) + ".csv";
    write_step_csv(out / name, rep.direct[a], rep.window, "per-cell, C_" + std::to_string(rep.js[a]));
    files.push_back(name);
  }
  for (std::size_t b = 0; b < rep.Ms.size(); ++b) {
    const std::string name = "pattern_M" + std::to_string(rep.Ms[b]) + ".csv";
    write_step_csv(out / name, rep.pattern[b], rep.window, "per-cell, pattern route M=" + std::to_string(rep.Ms[b]));
    files.push_back(name);
  }
  print_summary(log, rep);
  for (const auto& c : rep.comparisons) {
    if (!(c.distance <= c.bound)) {
      throw InvariantViolation("two-route bound violated at j=" + std::to_string(c.j) + ", M=" + std::to_string(c.M));
    }
  }
  return files;
}

/// Random step function on I with values in [-1, 1].
inline StepFunction random_test_function(std::mt19937_64& rng, const EnergyWindow& I, int pieces = 6) {
  std::uniform_real_distribution<double> pos(I.lo, I.hi), val(-1.0, 1.0);
  std::vector<double> b;
  for (int k = 0; k < pieces - 1; ++k) b.push_back(pos(rng));
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::vector<double> v;
  for (std::size_t k = 0; k <= b.size(); ++k) v.push_back(val(rng));
  return StepFunction(std::move(b), std::move(v));
}

inline std::vector<std::string> run_ssf(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const Coloring C = cfg.make_coloring();
  BackendParams params = cfg.backend_params();
  params.resolution = cfg.ssf.resolution;
  auto [A, B] = middle_facet_pair(C, params, cfg.ssf.cells);
  const FacetExperiment e = run_facet_experiment("middle facet of C_" + std::to_string(cfg.ssf.cells), A, B, cfg.window,
                                                 cfg.ssf.exponents, cfg.dimension_cap, cfg.ssf.floor);
  Json j = to_json(e);
  std::mt19937_64 rng(cfg.seed);
  Json young = Json::array();
  bool ok = true;
  for (std::size_t i = 0; i < e.exponents.size(); ++i) {
    ok = ok && e.direct[i] <= e.bounds[i].value;
    const ConvexGauge Fp = ConvexGauge::monomial(e.exponents[i]);
    int passed = 0;
    for (int s = 0; s < cfg.ssf.young_samples; ++s) {
      passed += young_check(random_test_function(rng, cfg.window), e.shift.xi, Fp, e.bounds[i].value, cfg.window).holds();
    }
    ok = ok && passed == cfg.ssf.young_samples;
    young.push_back({{"p", e.exponents[i]}, {"samples", cfg.ssf.young_samples}, {"passed", passed}});
  }
  j["young"] = young;
  write_json(out / "ssf_report.json", j);
  write_step_csv(out / "xi.csv", e.shift.xi, cfg.window, "spectral shift N(A)-N(B)");
  log << e.label << ": dim " << e.matrix_dim << ", " << e.series.mu.size() << " singular values";
  if (e.fit) {
    log << ", c_hat=" << e.fit->c_hat << ", C2_hat=" << e.fit->C2_hat << "\n";
  } else {
    log << ", no fit (" << e.fit_error << ")\n";
  }
  if (!ok) throw InvariantViolation("HS or Young inequality violated in the facet experiment");
  return {"ssf_report.json", "xi.csv"};
}

inline std::vector<std::string> run_weyl(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const Coloring C = cfg.make_coloring();
  const OperatorSpec spec{cube(cfg.weyl.L, cfg.dim), cfg.weyl.resolution, C, cfg.backend, cfg.library(), {}};
  if (operator_dimension(spec) > cfg.dimension_cap) throw std::length_error("weyl operator exceeds dimension cap");
  const auto eigs = eigenvalues(discretize(spec), cfg.window.hi);
  const double volume = std::pow(static_cast<double>(cfg.weyl.L), cfg.dim);
  const double a = 2.0 * std::numbers::pi * (1.0 - cfg.delta) * cfg.dim / std::numbers::e;
  std::ostringstream csv;
  csv.precision(17);
  csv << "n,E_n,lower_bound,margin\n";
  for (std::size_t n = 1; n <= eigs.size(); ++n) {
    const double lower = a * std::pow(static_cast<double>(n) / volume, 2.0 / cfg.dim) - cfg.C1;
    csv << n << "," << eigs[n - 1] << "," << lower << "," << eigs[n - 1] - lower << "\n";
  }
  write_file(out / "weyl.csv", csv.str());
  const double margin = weyl_check(eigs, volume, cfg.delta, cfg.C1, cfg.dim);
  Json j{{"L", cfg.weyl.L}, {"resolution", cfg.weyl.resolution}, {"eigenvalues", eigs.size()}, {"min_margin", margin}};
  if (cfg.dim == 1) {
    const auto f = scale(counting_function(eigs, cfg.window), 1.0 / volume);
    const EnergyWindow I(std::max(0.0, cfg.window.lo), cfg.window.hi, cfg.window.p);
    j["sup_deviation_free_ids"] =
        sup_deviation_monotone(f, [](double l) { return l > 0 ? std::sqrt(l) / std::numbers::pi : 0.0; }, I);
  }
  write_json(out / "weyl.json", j);
  log << "weyl: " << eigs.size() << " eigenvalues <= " << cfg.window.hi << ", min margin " << margin << "\n";
  return {"weyl.csv", "weyl.json"};
}

inline std::vector<std::string> run_random(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const SiteDistribution dist = cfg.distribution();
  const BackendParams params = cfg.backend_params();
  const auto grid = uniform_grid(cfg.window.lo, cfg.window.hi, cfg.random.grid_points);
  const McEstimate est = pastur_shubin_mc(dist, params, grid, cfg.random.samples, cfg.random.R, 0, cfg.scheduler());
  std::ostringstream csv;
  est.write_csv(csv);
  write_file(out / "mc.csv", csv.str());
  std::vector<std::uint64_t> omegas;
  for (std::size_t w = 0; w < cfg.random.omegas; ++w) omegas.push_back(1000000 + w);
  const auto cmp = compare_random_ids(dist, params, cfg.random.js, cfg.window, omegas, est.to_step_function(), cfg.scheduler());
  Json per = Json::array();
  for (std::size_t w = 0; w < omegas.size(); ++w) {
    per.push_back({{"omega", omegas[w]}, {"distance", cmp.distance[w]}, {"decreases", cmp.decreases(w)}});
  }
  Json j{{"manifest", {{"seed", dist.seed}, {"distribution", dist.describe()}, {"R", est.R}, {"S", est.samples}}},
         {"window", to_json(cfg.window)},
         {"j", cmp.js},
         {"per_omega", per},
         {"pair_spread", cmp.pair_spread}};
  write_json(out / "random_report.json", j);
  log << "random: S=" << est.samples << " R=" << est.R << ", " << omegas.size() << " sampled colorings compared\n";
  return {"mc.csv", "random_report.json"};
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline void write_manifest(const std::filesystem::path& out, const std::string& subcommand, const ExperimentConfig& cfg,
                           const std::vector<std::string>& files, int status) {
  Json m{{"subcommand", subcommand},
         {"timestamp", utc_timestamp()},
         {"seed", cfg.seed},
         {"jobs", cfg.jobs},
         {"status", status},
         {"config", cfg.to_json()},
         {"files", files}};
  write_json(out / "manifest.json", m);
}

inline const std::vector<std::string>& data_subcommands() {
  static const std::vector<std::string> names{"patterns", "ids", "ssf", "weyl", "random"};
  return names;
}

/// Runs one data subcommand. Returns 0, or 3 on an invariant violation.
inline int run_data_subcommand(const std::string& sub, const ExperimentConfig& cfg, const std::filesystem::path& out,
                               std::ostream& log, std::ostream& err) {
  std::filesystem::create_directories(out);
  std::vector<std::string> files;
  int status = 0;
  try {
    if (sub == "patterns") {
      files = run_patterns(cfg, out, log);
    } else if (sub == "ids") {
      files = run_ids(cfg, out, log);
    } else if (sub == "ssf") {
      files = run_ssf(cfg, out, log);
    } else if (sub == "weyl") {
      files = run_weyl(cfg, out, log);
    } else if (sub == "random") {
      files = run_random(cfg, out, log);
    } else {
      throw std::invalid_argument("unknown subcommand '" + sub + "'");
    }
  } catch (const InvariantViolation& e) {
    err << "invariant violated: " << e.what() << "\n";
    status = 3;
  }
  write_manifest(out, sub, cfg, files, status);
  return status;
}

}  // namespace idslab
