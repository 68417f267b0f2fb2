#pragma once

// JSON and CSV serialisation. Needs nlohmann/json.hpp on the include path.

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "idslab/ergodic.hpp"
#include "idslab/lattice.hpp"
#include "idslab/operator.hpp"
#include "idslab/random.hpp"
#include "idslab/spectral.hpp"
#include "idslab/ssf.hpp"

namespace idslab {

using Json = nlohmann::ordered_json;

inline Json to_json(const Site& s, int d) {
  Json a = Json::array();
  for (int i = 0; i < d; ++i) a.push_back(s[i]);
  return a;
}

inline Json to_json(const Pattern& P, const std::vector<std::string>& alphabet) {
  Json dom = Json::array();
  Json sym = Json::array();
  for (std::size_t i = 0; i < P.size(); ++i) {
    dom.push_back(to_json(P.domain().sites()[i], P.dim()));
    sym.push_back(alphabet.at(index(P.colors()[i])));
  }
  return Json{{"domain", dom}, {"assignment", sym}};
}

inline Json to_json(const FrequencyValue& v) {
  if (const auto* r = std::get_if<Rational>(&v)) return Json{{"num", r->num}, {"den", r->den}};
  return std::get<EstimatedFrequency>(v).value;
}

inline Json to_json(const FrequencyTable& t, const std::vector<std::string>& alphabet) {
  Json freq = Json::object();
  Json patterns = Json::array();
  for (const auto& [P, v] : t.entries) {
    const std::string key = pattern_key(P, alphabet);
    freq[key] = to_json(v);
    Json p = to_json(P, alphabet);
    p["key"] = key;
    patterns.push_back(std::move(p));
  }
  return Json{{"M", t.M}, {"dim", t.dim}, {"frequencies", freq}, {"patterns", patterns}};
}

inline FieldSamples field_from_json(const Json& j, int d) {
  if (j.is_number()) return FieldSamples::constant(j.get<double>());
  // nested arrays, axis 0 outermost
  std::vector<double> flat;
  std::vector<std::size_t> extents;
  auto walk = [&](auto&& self, const Json& node, int depth) -> void {
    if (depth == d) {
      if (!node.is_number()) throw std::invalid_argument("prototype samples must be numbers");
      flat.push_back(node.get<double>());
      return;
    }
    if (!node.is_array() || node.empty()) throw std::invalid_argument("prototype field must be a number or nested arrays of depth d");
    if (static_cast<int>(extents.size()) == depth) extents.push_back(node.size());
    if (node.size() != extents[static_cast<std::size_t>(depth)]) throw std::invalid_argument("ragged prototype array");
    for (const auto& child : node) self(self, child, depth + 1);
  };
  walk(walk, j, 0);
  const std::size_t n = extents.front();
  for (auto e : extents)
    if (e != n) throw std::invalid_argument("prototype array must be n^d");
  return FieldSamples{static_cast<int>(n), std::move(flat)};
}

/// {symbol: {"v": number | nested array, "a": [component, ...]}}.
inline PrototypeLibrary prototypes_from_json(const Json& j, int d) {
  if (!j.is_object()) throw std::invalid_argument("prototype library must be an object");
  PrototypeLibrary lib;
  for (const auto& [symbol, entry] : j.items()) {
    Prototype p;
    if (entry.is_number()) {
      p.v = FieldSamples::constant(entry.get<double>());
    } else {
      if (!entry.is_object()) throw std::invalid_argument("prototype '" + symbol + "' must be a number or an object");
      for (const auto& [k, _] : entry.items())
        if (k != "v" && k != "a") throw std::invalid_argument("prototype '" + symbol + "': unknown key '" + k + "'");
      if (entry.contains("v")) p.v = field_from_json(entry["v"], d);
      if (entry.contains("a")) {
        if (!entry["a"].is_array() || static_cast<int>(entry["a"].size()) != d) {
          throw std::invalid_argument("prototype '" + symbol + "': 'a' needs one component per axis");
        }
        for (const auto& comp : entry["a"]) p.a.push_back(field_from_json(comp, d));
      }
    }
    lib.add(symbol, std::move(p));
  }
  return lib;
}

inline PrototypeLibrary load_prototypes(const std::filesystem::path& path, int d) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open prototype library " + path.string());
  return prototypes_from_json(Json::parse(in, nullptr, true, true), d);
}

inline Json to_json(const StepFunction& f) {
  return Json{{"base", f.base_value()}, {"breakpoints", f.breakpoints()},
              {"values", std::vector<double>(f.values().begin() + 1, f.values().end())}};
}

inline Json to_json(const EnergyWindow& I) { return Json{{"lo", I.lo}, {"hi", I.hi}, {"p", I.p}}; }

inline Json to_json(const ErgodicReport& r) {
  Json cmp = Json::array();
  for (const auto& c : r.comparisons) {
    cmp.push_back({{"j", c.j},
                   {"M", c.M},
                   {"distance", c.distance},
                   {"boundary_ratio", c.boundary_ratio},
                   {"deviation_sum", c.deviation_sum},
                   {"bound", c.bound},
                   {"holds", c.distance <= c.bound}});
  }
  return Json{{"window", to_json(r.window)},
              {"j", r.js},
              {"M", r.Ms},
              {"cauchy", r.cauchy},
              {"constants", {{"K", r.K}, {"D", r.D}, {"C_tilde", r.C_tilde}}},
              {"comparisons", cmp}};
}

inline void print_summary(std::ostream& os, const ErgodicReport& r) {
  os << "     j    M      distance         bound   bound/dist\n";
  char line[128];
  for (const auto& c : r.comparisons) {
    std::snprintf(line, sizeof line, "%6d %4d  %12.6g  %12.6g  %11.4g\n", c.j, c.M, c.distance, c.bound,
                  c.distance > 0 ? c.bound / c.distance : std::numeric_limits<double>::infinity());
    os << line;
  }
}

inline Json to_json(const DecayFit& f) {
  return Json{{"c_hat", f.c_hat},           {"C2_hat", f.C2_hat},       {"max_residual", f.max_residual},
              {"C2_inflated", f.C2_inflated}, {"epsilon", f.epsilon},     {"points", f.points},
              {"envelope_holds", f.envelope_holds}};
}

inline Json to_json(const FacetExperiment& e) {
  Json hs = Json::array();
  for (std::size_t i = 0; i < e.exponents.size(); ++i) {
    hs.push_back({{"p", e.exponents[i]},
                  {"direct", e.direct[i]},
                  {"hs_bound", e.bounds[i].value},
                  {"converged", e.bounds[i].converged},
                  {"holds", e.direct[i] <= e.bounds[i].value}});
  }
  Json j{{"label", e.label},
         {"dim", e.dim},
         {"matrix_dim", e.matrix_dim},
         {"window", to_json(e.window)},
         {"mu", e.series.mu},
         {"mu_complete", e.series.complete},
         {"source", e.series.source},
         {"hs", hs}};
  if (e.fit) {
    j["fit"] = to_json(*e.fit);
  } else {
    j["fit"] = nullptr;
    j["fit_error"] = e.fit_error;
  }
  return j;
}

/// Writes text, creating parent directories.
inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

inline void write_step_csv(const std::filesystem::path& path, const StepFunction& f, const EnergyWindow& I,
                           const std::string& normalization) {
  std::ostringstream os;
  write_csv(os, f, I, normalization);
  write_file(path, os.str());
}

}  // namespace idslab
