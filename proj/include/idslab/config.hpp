#pragma once

// Experiment configuration: JSON with comments, every key optional with a
// default, unknown keys rejected. Errors carry the config line number.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "idslab/io.hpp"

namespace idslab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ColoringConfig {
  std::string kind = "periodic";                 // periodic | constant | iid
  std::vector<int> period{2};                    // periodic: one entry per axis
  std::vector<std::string> tile{"a", "b"};       // periodic: row-major, axis 0 slowest
  std::string symbol = "a";                      // constant
  std::map<std::string, double> weights;         // iid
};

struct ExperimentConfig {
  int dim = 1;
  Backend backend = Backend::lattice;
  std::string prototypes_path;                   // relative to the config file
  Json prototypes = Json{{"a", 0.0}, {"b", 1.0}};  // used when no path is given
  ColoringConfig coloring;
  std::vector<int> js{8, 16, 32, 64, 128, 256};
  EnergyWindow window{0.0, 4.5, 2.0};
  std::vector<int> Ms{1, 2, 3, 4, 5, 6};
  int resolution = 8;
  std::size_t dimension_cap = 3000;
  double C = 1.0, c_pd = 1.0, C1 = 0.0, delta = 0.0;
  std::uint64_t seed = 1;
  std::string output = "out";
  unsigned jobs = 1;
  std::size_t memory_budget_mb = 2048;

  struct {
    int cells = 16;
    int resolution = 8;
    std::vector<double> exponents{1.0, 2.0, 3.0};
    int young_samples = 100;
    double floor = 1e-13;
  } ssf;

  struct {
    int L = 64;
    int resolution = 16;
  } weyl;

  struct {
    std::map<std::string, double> weights{{"a", 0.5}, {"b", 0.5}};
    std::size_t samples = 200;
    int R = 32;
    std::size_t grid_points = 91;
    std::vector<int> js{32, 64, 128, 256};
    std::size_t omegas = 5;
    double truncation_tolerance = 1e-3;
  } random;

  std::filesystem::path base_dir;

  std::shared_ptr<const PrototypeLibrary> library() const {
    if (prototypes_path.empty()) return std::make_shared<const PrototypeLibrary>(prototypes_from_json(prototypes, dim));
    return std::make_shared<const PrototypeLibrary>(load_prototypes(base_dir / prototypes_path, dim));
  }

  std::vector<std::string> alphabet() const {
    std::vector<std::string> a;
    const auto lib = library();
    for (const auto& [k, _] : lib->entries()) a.push_back(k);
    return a;
  }

  Coloring make_coloring() const {
    const auto alpha = alphabet();
    auto id = [&](const std::string& s) {
      auto it = std::find(alpha.begin(), alpha.end(), s);
      if (it == alpha.end()) throw ConfigError("coloring uses symbol '" + s + "' without a prototype");
      return ColorId{static_cast<std::uint32_t>(it - alpha.begin())};
    };
    if (coloring.kind == "constant") return Coloring::constant(dim, alpha, id(coloring.symbol));
    if (coloring.kind == "periodic") {
      Site p;
      for (int i = 0; i < dim; ++i) p[i] = coloring.period[static_cast<std::size_t>(i)];
      std::vector<ColorId> tile;
      for (const auto& s : coloring.tile) tile.push_back(id(s));
      return Coloring::periodic(dim, alpha, p, std::move(tile));
    }
    return Coloring::pseudorandom(dim, alpha, weight_vector(coloring.weights), seed);
  }

  SiteDistribution distribution() const { return SiteDistribution{alphabet(), weight_vector(random.weights), seed, dim}; }

  BackendParams backend_params() const { return BackendParams{backend, resolution, library(), dimension_cap}; }

  Scheduler scheduler() const { return Scheduler{jobs, memory_budget_mb << 20}; }

  std::vector<double> weight_vector(const std::map<std::string, double>& w) const {
    const auto alpha = alphabet();
    std::vector<double> out(alpha.size(), 0.0);
    for (const auto& [s, x] : w) {
      auto it = std::find(alpha.begin(), alpha.end(), s);
      if (it == alpha.end()) throw ConfigError("weight given for symbol '" + s + "' without a prototype");
      out[static_cast<std::size_t>(it - alpha.begin())] = x;
    }
    return out;
  }

  Json to_json() const {
    Json col{{"kind", coloring.kind}};
    if (coloring.kind == "periodic") {
      col["period"] = coloring.period;
      col["tile"] = coloring.tile;
    } else if (coloring.kind == "constant") {
      col["symbol"] = coloring.symbol;
    } else {
      col["weights"] = coloring.weights;
    }
    Json j{{"dimension", dim},
           {"backend", idslab::to_string(backend)},
           {"coloring", col},
           {"sequence", {{"list", js}}},
           {"window", {{"lo", window.lo}, {"hi", window.hi}, {"p", window.p}}},
           {"M", Ms},
           {"resolution", resolution},
           {"dimension_cap", dimension_cap},
           {"constants", {{"C", C}, {"c_pd", c_pd}, {"C1", C1}, {"delta", delta}}},
           {"seed", seed},
           {"ssf",
            {{"cells", ssf.cells},
             {"resolution", ssf.resolution},
             {"exponents", ssf.exponents},
             {"young_samples", ssf.young_samples},
             {"floor", ssf.floor}}},
           {"weyl", {{"L", weyl.L}, {"resolution", weyl.resolution}}},
           {"random",
            {{"weights", random.weights},
             {"samples", random.samples},
             {"R", random.R},
             {"grid_points", random.grid_points},
             {"j", random.js},
             {"omegas", random.omegas},
             {"truncation_tolerance", random.truncation_tolerance}}}};
    if (prototypes_path.empty()) {
      j["prototypes"] = prototypes;
    } else {
      j["prototypes"] = prototypes_path;
    }
    return j;
  }
};

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

/// Walks the parsed document and reports problems at the line of the key.
class ConfigReader {
 public:
  explicit ConfigReader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const auto pos = text_.find("\"" + key + "\"");
    const int line = pos == std::string::npos ? 0 : line_of_offset(text_, pos);
    throw ConfigError("config:" + std::to_string(line) + ": " + message);
  }

  void only(const Json& obj, const std::string& where, std::initializer_list<const char*> known) const {
    if (!obj.is_object()) fail(where, "'" + where + "' must be an object");
    for (const auto& [k, _] : obj.items()) {
      if (std::none_of(known.begin(), known.end(), [&](const char* s) { return k == s; })) {
        fail(k, "unknown key '" + k + "' in '" + where + "'");
      }
    }
  }

  template <class T>
  void get(const Json& obj, const char* key, T& out) const {
    if (!obj.contains(key)) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(key, std::string("key '") + key + "' has the wrong type");
    }
  }

 private:
  const std::string& text_;
};

}  // namespace detail

/// Parses and validates. base_dir anchors relative paths.
inline ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".") {
  Json root;
  try {
    root = Json::parse(text, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config:" + std::to_string(detail::line_of_offset(text, e.byte ? e.byte - 1 : 0)) +
                      ": parse error: " + e.what());
  }
  const detail::ConfigReader r(text);
  ExperimentConfig c;
  c.base_dir = base_dir;
  r.only(root, "config",
         {"dimension", "backend", "prototypes", "coloring", "sequence", "window", "M", "resolution", "dimension_cap",
          "constants", "seed", "output", "jobs", "memory_budget_mb", "ssf", "weyl", "random"});
  r.get(root, "dimension", c.dim);
  if (c.dim < 1 || c.dim > 3) r.fail("dimension", "dimension must be 1, 2 or 3");

  std::string backend = idslab::to_string(c.backend);
  r.get(root, "backend", backend);
  if (backend == "lattice") {
    c.backend = Backend::lattice;
  } else if (backend == "continuum") {
    c.backend = Backend::continuum;
  } else {
    r.fail("backend", "backend must be 'lattice' or 'continuum'");
  }

  if (root.contains("prototypes")) {
    if (root["prototypes"].is_string()) {
      c.prototypes_path = root["prototypes"].get<std::string>();
    } else {
      c.prototypes = root["prototypes"];
    }
  }
  try {
    (void)c.library();
  } catch (const std::exception& e) {
    r.fail("prototypes", std::string("invalid prototype library: ") + e.what());
  }

  if (root.contains("coloring")) {
    const Json& col = root["coloring"];
    r.only(col, "coloring", {"kind", "period", "tile", "symbol", "weights"});
    r.get(col, "kind", c.coloring.kind);
    r.get(col, "period", c.coloring.period);
    r.get(col, "tile", c.coloring.tile);
    r.get(col, "symbol", c.coloring.symbol);
    r.get(col, "weights", c.coloring.weights);
  }
  if (c.coloring.kind != "periodic" && c.coloring.kind != "constant" && c.coloring.kind != "iid") {
    r.fail("kind", "coloring kind must be periodic, constant or iid");
  }
  if (c.coloring.kind == "periodic" && static_cast<int>(c.coloring.period.size()) != c.dim) {
    r.fail("period", "period needs one entry per axis");
  }
  try {
    (void)c.make_coloring();
  } catch (const std::exception& e) {
    r.fail("coloring", std::string("invalid coloring: ") + e.what());
  }

  if (root.contains("sequence")) {
    const Json& s = root["sequence"];
    r.only(s, "sequence", {"cubes_up_to", "from", "list"});
    if (s.contains("list") && s.contains("cubes_up_to")) r.fail("sequence", "give either 'list' or 'cubes_up_to'");
    if (s.contains("list")) {
      r.get(s, "list", c.js);
    } else if (s.contains("cubes_up_to")) {
      int hi = 0, lo = 1;
      r.get(s, "cubes_up_to", hi);
      r.get(s, "from", lo);
      c.js.clear();
      for (int j = lo; j <= hi; j *= 2) c.js.push_back(j);
    }
  }
  if (c.js.empty()) r.fail("sequence", "van Hove sequence must not be empty");
  for (std::size_t i = 0; i < c.js.size(); ++i) {
    if (c.js[i] < 1 || (i && c.js[i] <= c.js[i - 1])) r.fail("sequence", "cube sides must be positive and increasing");
  }

  if (root.contains("window")) {
    const Json& w = root["window"];
    r.only(w, "window", {"lo", "hi", "p"});
    double lo = c.window.lo, hi = c.window.hi, p = c.window.p;
    r.get(w, "lo", lo);
    r.get(w, "hi", hi);
    r.get(w, "p", p);
    try {
      c.window = EnergyWindow(lo, hi, p);
    } catch (const std::exception& e) {
      r.fail("window", e.what());
    }
  }

  r.get(root, "M", c.Ms);
  if (c.Ms.empty()) r.fail("M", "M list must not be empty");
  for (int M : c.Ms)
    if (M < 1) r.fail("M", "M values must be >= 1");

  r.get(root, "resolution", c.resolution);
  if (c.resolution < 2) r.fail("resolution", "resolution must be >= 2");
  r.get(root, "dimension_cap", c.dimension_cap);

  if (root.contains("constants")) {
    const Json& k = root["constants"];
    r.only(k, "constants", {"C", "c_pd", "C1", "delta"});
    r.get(k, "C", c.C);
    r.get(k, "c_pd", c.c_pd);
    r.get(k, "C1", c.C1);
    r.get(k, "delta", c.delta);
    if (!(c.C > 0) || !(c.c_pd > 0)) r.fail("constants", "C and c_pd must be positive");
    if (c.delta < 0 || c.delta >= 1) r.fail("delta", "delta must lie in [0, 1)");
  }
  r.get(root, "seed", c.seed);
  r.get(root, "output", c.output);
  r.get(root, "jobs", c.jobs);
  if (c.jobs < 1) r.fail("jobs", "jobs must be >= 1");
  r.get(root, "memory_budget_mb", c.memory_budget_mb);

  if (root.contains("ssf")) {
    const Json& s = root["ssf"];
    r.only(s, "ssf", {"cells", "resolution", "exponents", "young_samples", "floor"});
    r.get(s, "cells", c.ssf.cells);
    r.get(s, "resolution", c.ssf.resolution);
    r.get(s, "exponents", c.ssf.exponents);
    r.get(s, "young_samples", c.ssf.young_samples);
    r.get(s, "floor", c.ssf.floor);
  }
  if (c.ssf.cells < 2) r.fail("cells", "ssf.cells must be >= 2");
  for (double p : c.ssf.exponents)
    if (p < 1) r.fail("exponents", "exponents must be >= 1");

  if (root.contains("weyl")) {
    const Json& w = root["weyl"];
    r.only(w, "weyl", {"L", "resolution"});
    r.get(w, "L", c.weyl.L);
    r.get(w, "resolution", c.weyl.resolution);
  }
  if (c.weyl.L < 1 || c.weyl.resolution < 2) r.fail("weyl", "weyl.L >= 1 and weyl.resolution >= 2 required");

  if (root.contains("random")) {
    const Json& q = root["random"];
    r.only(q, "random", {"weights", "samples", "R", "grid_points", "j", "omegas", "truncation_tolerance"});
    r.get(q, "weights", c.random.weights);
    r.get(q, "samples", c.random.samples);
    r.get(q, "R", c.random.R);
    r.get(q, "grid_points", c.random.grid_points);
    r.get(q, "j", c.random.js);
    r.get(q, "omegas", c.random.omegas);
    r.get(q, "truncation_tolerance", c.random.truncation_tolerance);
  }
  if (c.random.samples < 1) r.fail("samples", "random.samples must be >= 1");
  if (c.random.R < 1) r.fail("R", "random.R must be >= 1");
  if (c.random.grid_points < 2) r.fail("grid_points", "random.grid_points must be >= 2");
  if (c.random.js.empty()) r.fail("random", "random.j must not be empty");
  try {
    c.distribution().validate();
  } catch (const std::exception& e) {
    r.fail("weights", std::string("invalid site distribution: ") + e.what());
  }
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace idslab
