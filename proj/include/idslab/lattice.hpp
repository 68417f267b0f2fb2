#pragma once

// Combinatorics on Z^d: sites, finite sets, cubes, boundaries, colorings,
// patterns, occurrence counting and pattern frequencies.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace idslab {

inline constexpr int kMaxDim = 3;

inline void check_dimension(int d) {
  if (d < 1 || d > kMaxDim) {
    throw std::invalid_argument("dimension must be 1, 2 or 3, got " + std::to_string(d));
  }
}

/// A point of Z^d. Coordinates beyond the active dimension stay zero, so the
/// lexicographic order on the full array is the order on Z^d.
struct Site {
  std::array<int, kMaxDim> c{};

  constexpr Site() = default;
  constexpr Site(int x0, int x1 = 0, int x2 = 0) : c{x0, x1, x2} {}

  constexpr int& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  constexpr int operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend constexpr Site operator+(Site a, const Site& b) {
    for (int i = 0; i < kMaxDim; ++i) a[i] += b[i];
    return a;
  }
  friend constexpr Site operator-(Site a, const Site& b) {
    for (int i = 0; i < kMaxDim; ++i) a[i] -= b[i];
    return a;
  }
  friend constexpr Site operator*(int k, Site a) {
    for (int i = 0; i < kMaxDim; ++i) a[i] *= k;
    return a;
  }
  friend constexpr auto operator<=>(const Site&, const Site&) = default;

  static constexpr Site unit(int axis) {
    Site e;
    e[axis] = 1;
    return e;
  }
};

inline int chebyshev_distance(const Site& a, const Site& b) {
  int r = 0;
  for (int i = 0; i < kMaxDim; ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

inline std::string to_string(const Site& s, int d) {
  std::string out = "(";
  for (int i = 0; i < d; ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

/// Calls f(offset) for every offset in {lo..hi}^d, lexicographic order.
template <class F>
void for_each_offset(int d, int lo, int hi, F&& f) {
  if (hi < lo) return;
  Site x;
  for (int i = 0; i < d; ++i) x[i] = lo;
  while (true) {
    f(x);
    int i = d - 1;
    while (i >= 0 && x[i] == hi) {
      x[i] = lo;
      --i;
    }
    if (i < 0) return;
    ++x[i];
  }
}

/// A finite subset of Z^d, stored sorted without duplicates.
class FiniteSet {
 public:
  FiniteSet() = default;
  FiniteSet(int dim, std::vector<Site> sites) : dim_(dim), sites_(std::move(sites)) {
    check_dimension(dim_);
    for (const auto& s : sites_) {
      for (int i = dim_; i < kMaxDim; ++i) {
        if (s[i] != 0) throw std::invalid_argument("site has nonzero coordinate beyond dimension");
      }
    }
    std::sort(sites_.begin(), sites_.end());
    sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  }

  int dim() const { return dim_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  const std::vector<Site>& sites() const { return sites_; }
  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }

  bool contains(const Site& s) const { return std::binary_search(sites_.begin(), sites_.end(), s); }

  /// Position of s in sites(), or size() if absent.
  std::size_t index_of(const Site& s) const {
    auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
    if (it == sites_.end() || *it != s) return sites_.size();
    return static_cast<std::size_t>(it - sites_.begin());
  }

  FiniteSet translated(const Site& x) const {
    FiniteSet out = *this;
    for (auto& s : out.sites_) s = s + x;
    return out;  // translation preserves lexicographic order
  }

  /// Componentwise minimum and maximum; requires a nonempty set.
  std::pair<Site, Site> bounding_box() const {
    if (sites_.empty()) throw std::invalid_argument("bounding box of empty set");
    Site lo = sites_.front(), hi = sites_.front();
    for (const auto& s : sites_) {
      for (int i = 0; i < dim_; ++i) {
        lo[i] = std::min(lo[i], s[i]);
        hi[i] = std::max(hi[i], s[i]);
      }
    }
    return {lo, hi};
  }

  friend bool operator==(const FiniteSet&, const FiniteSet&) = default;
  friend auto operator<=>(const FiniteSet& a, const FiniteSet& b) {
    if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
    return a.sites_ <=> b.sites_;
  }

 private:
  int dim_ = 1;
  std::vector<Site> sites_;
};

inline FiniteSet set_union(const FiniteSet& a, const FiniteSet& b) {
  std::vector<Site> s = a.sites();
  s.insert(s.end(), b.sites().begin(), b.sites().end());
  return FiniteSet(a.dim(), std::move(s));
}

/// C_M = {x : 0 <= x_j <= M-1}.
inline FiniteSet cube(int M, int d) {
  check_dimension(d);
  if (M < 1) throw std::invalid_argument("cube side must be >= 1");
  std::vector<Site> s;
  for_each_offset(d, 0, M - 1, [&](const Site& x) { s.push_back(x); });
  return FiniteSet(d, std::move(s));
}

/// Two-sided M-boundary with the Chebyshev metric:
/// {x in Q : dist(x, Z^d \ Q) <= M} ∪ {x notin Q : dist(x, Q) <= M}.
inline FiniteSet boundary(const FiniteSet& Q, int M) {
  if (Q.empty()) throw std::invalid_argument("boundary of empty set");
  if (M < 1) throw std::invalid_argument("boundary width must be >= 1");
  const int d = Q.dim();
  std::vector<Site> out;
  for (const auto& x : Q) {
    bool inner = false;
    for_each_offset(d, -M, M, [&](const Site& o) {
      const Site y = x + o;
      if (!Q.contains(y)) {
        inner = true;
        out.push_back(y);
      }
    });
    if (inner) out.push_back(x);
  }
  return FiniteSet(d, std::move(out));
}

/// Inner part of the M-boundary: sites of Q within distance M of the complement.
inline FiniteSet inner_boundary(const FiniteSet& Q, int M) {
  if (M < 1) throw std::invalid_argument("boundary width must be >= 1");
  const int d = Q.dim();
  std::vector<Site> out;
  for (const auto& x : Q) {
    bool inner = false;
    for_each_offset(d, -M, M, [&](const Site& o) { inner = inner || !Q.contains(x + o); });
    if (inner) out.push_back(x);
  }
  return FiniteSet(d, std::move(out));
}

/// Exact nonnegative rational with 64-bit parts, kept in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw std::domain_error("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const auto g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    const auto g = std::gcd(a.den, b.den);
    return Rational(a.num * (b.den / g) + b.num * (a.den / g), a.den / g * b.den);
  }
  friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
  friend auto operator<=>(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den <=> static_cast<__int128>(b.num) * a.den;
  }
};

inline std::string to_string(const Rational& r) { return std::to_string(r.num) + "/" + std::to_string(r.den); }

struct VanHoveReport {
  std::vector<Rational> ratios;
  bool monotone_tail = false;
};

/// ♯∂^M U_j / ♯U_j per element. The monotone flag requires at least two
/// entries, no increase between neighbours and a strict overall decrease.
inline VanHoveReport van_hove_ratios(std::span<const FiniteSet> sequence, int M) {
  VanHoveReport r;
  for (const auto& U : sequence) {
    if (U.empty()) throw std::invalid_argument("van Hove sequence element is empty");
    r.ratios.emplace_back(static_cast<std::int64_t>(boundary(U, M).size()), static_cast<std::int64_t>(U.size()));
  }
  if (r.ratios.size() >= 2) {
    bool ok = true;
    for (std::size_t k = 1; k < r.ratios.size(); ++k) ok = ok && !(r.ratios[k] > r.ratios[k - 1]);
    r.monotone_tail = ok && r.ratios.back() < r.ratios.front();
  }
  return r;
}

enum class ColorId : std::uint32_t {};

inline constexpr std::uint32_t index(ColorId c) { return static_cast<std::uint32_t>(c); }

/// splitmix64 finaliser; also used for seeding derived streams.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based hash of (seed, site): independent of evaluation order.
inline constexpr std::uint64_t site_hash(std::uint64_t seed, const Site& x) {
  std::uint64_t h = mix64(seed);
  for (int i = 0; i < kMaxDim; ++i) {
    h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(x[i])) ^ (static_cast<std::uint64_t>(i) << 40));
  }
  return h;
}

/// A total map Z^d -> alphabet, backed by a generator rule.
class Coloring {
 public:
  struct Periodic {
    Site period;                // p_i >= 1 on active axes
    std::vector<ColorId> tile;  // row-major over the period cell, axis 0 slowest
  };
  struct Window {
    std::shared_ptr<const std::map<Site, ColorId>> colors;
    ColorId background;
  };
  struct Pseudorandom {
    std::vector<double> cumulative;  // cumulative weights, last == 1
    std::uint64_t seed;
  };

  static Coloring periodic(int d, std::vector<std::string> alphabet, Site period, std::vector<ColorId> tile) {
    check_dimension(d);
    std::size_t volume = 1;
    for (int i = 0; i < d; ++i) {
      if (period[i] < 1) throw std::invalid_argument("period must be >= 1 on every axis");
      volume *= static_cast<std::size_t>(period[i]);
    }
    for (int i = d; i < kMaxDim; ++i) period[i] = 1;
    if (tile.size() != volume) throw std::invalid_argument("periodic tile size does not match period volume");
    Coloring c(d, std::move(alphabet), Periodic{period, std::move(tile)});
    c.check_ids();
    return c;
  }

  static Coloring constant(int d, std::vector<std::string> alphabet, ColorId color) {
    return periodic(d, std::move(alphabet), Site(1, 1, 1), {color});
  }

  static Coloring window(int d, std::vector<std::string> alphabet, std::map<Site, ColorId> colors,
                         ColorId background) {
    check_dimension(d);
    Coloring c(d, std::move(alphabet),
               Window{std::make_shared<const std::map<Site, ColorId>>(std::move(colors)), background});
    c.check_ids();
    return c;
  }

  static Coloring pseudorandom(int d, std::vector<std::string> alphabet, const std::vector<double>& weights,
                               std::uint64_t seed) {
    check_dimension(d);
    if (weights.size() != alphabet.size() || weights.empty()) {
      throw std::invalid_argument("one weight per alphabet symbol required");
    }
    std::vector<double> cum;
    double acc = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
      acc += w;
      cum.push_back(acc);
    }
    if (std::abs(acc - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
    cum.back() = 1.0;
    return Coloring(d, std::move(alphabet), Pseudorandom{std::move(cum), seed});
  }

  ColorId operator()(const Site& x) const {
    return std::visit(
        [&](const auto& g) -> ColorId {
          using G = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<G, Periodic>) {
            std::size_t idx = 0;
            for (int i = 0; i < dim_; ++i) {
              const int p = g.period[i];
              const int r = ((x[i] % p) + p) % p;
              idx = idx * static_cast<std::size_t>(p) + static_cast<std::size_t>(r);
            }
            return g.tile[idx];
          } else if constexpr (std::is_same_v<G, Window>) {
            auto it = g.colors->find(x);
            return it == g.colors->end() ? g.background : it->second;
          } else {
            const double u = static_cast<double>(site_hash(g.seed, x) >> 11) * 0x1.0p-53;
            auto it = std::upper_bound(g.cumulative.begin(), g.cumulative.end(), u);
            if (it == g.cumulative.end()) --it;
            return ColorId{static_cast<std::uint32_t>(it - g.cumulative.begin())};
          }
        },
        rule_);
  }

  int dim() const { return dim_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::string& name(ColorId c) const { return alphabet_.at(index(c)); }
  bool is_periodic() const { return std::holds_alternative<Periodic>(rule_); }
  const Periodic& periodic_rule() const {
    if (!is_periodic()) throw std::logic_error("coloring is not periodic");
    return std::get<Periodic>(rule_);
  }

  /// Sites of one period cell {0 <= x_i < p_i}.
  FiniteSet period_cell() const {
    const auto& p = periodic_rule().period;
    int widest = 1;
    for (int i = 0; i < dim_; ++i) widest = std::max(widest, p[i]);
    std::vector<Site> s;
    for_each_offset(dim_, 0, widest - 1, [&](const Site& x) {
      for (int i = 0; i < dim_; ++i)
        if (x[i] >= p[i]) return;
      s.push_back(x);
    });
    return FiniteSet(dim_, std::move(s));
  }

  /// Short human-readable description, also used as a digest in reports.
  std::string describe() const {
    std::ostringstream os;
    os << "d=" << dim_ << " ";
    std::visit(
        [&](const auto& g) {
          using G = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<G, Periodic>) {
            os << "periodic period=" << to_string(g.period, dim_) << " tile=";
            for (auto c : g.tile) os << alphabet_[index(c)] << ' ';
          } else if constexpr (std::is_same_v<G, Window>) {
            os << "window sites=" << g.colors->size() << " background=" << alphabet_[index(g.background)];
          } else {
            os << "pseudorandom seed=" << g.seed;
          }
        },
        rule_);
    return os.str();
  }

 private:
  Coloring(int d, std::vector<std::string> alphabet, std::variant<Periodic, Window, Pseudorandom> rule)
      : dim_(d), alphabet_(std::move(alphabet)), rule_(std::move(rule)) {
    if (alphabet_.empty()) throw std::invalid_argument("alphabet must not be empty");
  }

  void check_ids() const {
    auto ok = [&](ColorId c) { return index(c) < alphabet_.size(); };
    std::visit(
        [&](const auto& g) {
          using G = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<G, Periodic>) {
            for (auto c : g.tile)
              if (!ok(c)) throw std::invalid_argument("tile uses a color outside the alphabet");
          } else if constexpr (std::is_same_v<G, Window>) {
            if (!ok(g.background)) throw std::invalid_argument("background outside the alphabet");
            for (const auto& [s, c] : *g.colors)
              if (!ok(c)) throw std::invalid_argument("window uses a color outside the alphabet");
          }
        },
        rule_);
  }

  int dim_;
  std::vector<std::string> alphabet_;
  std::variant<Periodic, Window, Pseudorandom> rule_;
};

/// A map D(P) -> alphabet. Colors are stored parallel to the sorted domain.
class Pattern {
 public:
  Pattern() = default;
  Pattern(FiniteSet domain, std::vector<ColorId> colors) : domain_(std::move(domain)), colors_(std::move(colors)) {
    if (colors_.size() != domain_.size()) throw std::invalid_argument("pattern assignment must cover its domain exactly");
  }

  static Pattern from_map(int d, const std::map<Site, ColorId>& m) {
    std::vector<Site> s;
    std::vector<ColorId> c;
    for (const auto& [x, col] : m) {
      s.push_back(x);
      c.push_back(col);
    }
    return Pattern(FiniteSet(d, std::move(s)), std::move(c));  // map order == set order
  }

  const FiniteSet& domain() const { return domain_; }
  const std::vector<ColorId>& colors() const { return colors_; }
  int dim() const { return domain_.dim(); }
  std::size_t size() const { return domain_.size(); }

  ColorId at(const Site& x) const {
    const auto i = domain_.index_of(x);
    if (i == domain_.size()) throw std::out_of_range("site outside pattern domain");
    return colors_[i];
  }

  Pattern translated(const Site& x) const { return Pattern(domain_.translated(x), colors_); }

  /// Translate so the bounding box's minimal corner is the origin.
  Pattern canonical() const {
    if (domain_.empty()) return *this;
    return translated(Site() - domain_.bounding_box().first);
  }

  Pattern restricted(const FiniteSet& Q) const {
    std::vector<ColorId> c;
    c.reserve(Q.size());
    for (const auto& x : Q) c.push_back(at(x));
    return Pattern(Q, std::move(c));
  }

  friend bool operator==(const Pattern&, const Pattern&) = default;
  friend auto operator<=>(const Pattern& a, const Pattern& b) {
    if (auto c = a.domain_ <=> b.domain_; c != 0) return c;
    return a.colors_ <=> b.colors_;
  }

 private:
  FiniteSet domain_;
  std::vector<ColorId> colors_;
};

/// Human-readable key "a,b;(0),(1)"-style; used as JSON object key.
inline std::string pattern_key(const Pattern& P, const std::vector<std::string>& alphabet) {
  std::string out;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (i) out += ",";
    out += alphabet.at(index(P.colors()[i]));
  }
  out += "@";
  for (std::size_t i = 0; i < P.size(); ++i) out += to_string(P.domain().sites()[i], P.dim());
  return out;
}

inline Pattern restrict(const Coloring& C, const FiniteSet& Q) {
  if (Q.dim() != C.dim()) throw std::invalid_argument("dimension mismatch between coloring and set");
  std::vector<ColorId> c;
  c.reserve(Q.size());
  for (const auto& x : Q) c.push_back(C(x));
  return Pattern(Q, std::move(c));
}

/// ♯{x : D(P)+x ⊆ D(P') and P'|_{D(P)+x} = P+x}.
inline std::int64_t occurrences(const Pattern& P, const Pattern& Pp) {
  if (P.size() == 0) throw std::invalid_argument("occurrences of an empty pattern are unbounded");
  if (P.size() > Pp.size()) return 0;
  const Site anchor = P.domain().sites().front();
  std::int64_t count = 0;
  for (const auto& y : Pp.domain()) {
    const Site x = y - anchor;
    bool match = true;
    for (std::size_t i = 0; i < P.size() && match; ++i) {
      const auto k = Pp.domain().index_of(P.domain().sites()[i] + x);
      match = k != Pp.size() && Pp.colors()[k] == P.colors()[i];
    }
    count += match ? 1 : 0;
  }
  return count;
}

using PatternTally = std::map<Pattern, std::int64_t>;

/// Tally of canonical window patterns C|_{C_M+x} - x over all x with C_M+x ⊆ U.
inline PatternTally enumerate_window_patterns(const Coloring& C, const FiniteSet& U, int M) {
  const int d = C.dim();
  const FiniteSet window = cube(M, d);
  PatternTally tally;
  std::vector<ColorId> colors(window.size());
  for (const auto& x : U) {
    bool inside = true;
    for (std::size_t i = 0; i < window.size() && inside; ++i) inside = U.contains(window.sites()[i] + x);
    if (!inside) continue;
    for (std::size_t i = 0; i < window.size(); ++i) colors[i] = C(window.sites()[i] + x);
    ++tally[Pattern(window, colors)];
  }
  return tally;
}

/// Number of base points x with C_M + x ⊆ U.
inline std::int64_t window_positions(const FiniteSet& U, int M) {
  const FiniteSet window = cube(M, U.dim());
  std::int64_t n = 0;
  for (const auto& x : U) {
    bool inside = true;
    for (std::size_t i = 0; i < window.size() && inside; ++i) inside = U.contains(window.sites()[i] + x);
    n += inside ? 1 : 0;
  }
  return n;
}

/// Exact frequency of P in a periodic coloring: matches with base point in one
/// period cell, divided by the cell volume.
inline Rational exact_frequency(const Coloring& C, const Pattern& P) {
  if (!C.is_periodic()) throw std::invalid_argument("exact frequency requires a periodic coloring");
  if (P.size() == 0) throw std::invalid_argument("frequency of an empty pattern");
  const FiniteSet cell = C.period_cell();
  std::int64_t hits = 0;
  for (const auto& x : cell) {
    bool match = true;
    for (std::size_t i = 0; i < P.size() && match; ++i) match = C(P.domain().sites()[i] + x) == P.colors()[i];
    hits += match ? 1 : 0;
  }
  return Rational(hits, static_cast<std::int64_t>(cell.size()));
}

struct FrequencyEstimate {
  std::vector<double> ratios;  // ♯_P(C|_{U_j}) / ♯U_j
  double last = 0.0;
};

inline FrequencyEstimate estimate_frequency(const Coloring& C, const Pattern& P, std::span<const FiniteSet> sequence) {
  FrequencyEstimate e;
  for (const auto& U : sequence) {
    if (U.empty()) throw std::invalid_argument("empty set in frequency sequence");
    e.ratios.push_back(static_cast<double>(occurrences(P, restrict(C, U))) / static_cast<double>(U.size()));
  }
  if (!e.ratios.empty()) e.last = e.ratios.back();
  return e;
}

struct EstimatedFrequency {
  double value = 0.0;
  std::int64_t samples = 0;  // ♯U the estimate is normalised by
  friend bool operator==(const EstimatedFrequency&, const EstimatedFrequency&) = default;
};

using FrequencyValue = std::variant<Rational, EstimatedFrequency>;

inline double frequency_value(const FrequencyValue& v) {
  return std::visit(
      [](const auto& x) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Rational>) {
          return x.value();
        } else {
          return x.value;
        }
      },
      v);
}

/// Frequencies of canonical patterns with domain C_M.
struct FrequencyTable {
  int M = 1;
  int dim = 1;
  std::map<Pattern, FrequencyValue> entries;

  double value(const Pattern& P) const {
    auto it = entries.find(P.canonical());
    return it == entries.end() ? 0.0 : frequency_value(it->second);
  }
};

/// Exact table for a periodic coloring: windows based in one period cell.
inline FrequencyTable exact_frequency_table(const Coloring& C, int M) {
  if (!C.is_periodic()) throw std::invalid_argument("exact frequency table requires a periodic coloring");
  const FiniteSet cell = C.period_cell();
  const FiniteSet window = cube(M, C.dim());
  std::map<Pattern, std::int64_t> hits;
  std::vector<ColorId> colors(window.size());
  for (const auto& x : cell) {
    for (std::size_t i = 0; i < window.size(); ++i) colors[i] = C(window.sites()[i] + x);
    ++hits[Pattern(window, colors)];
  }
  FrequencyTable t{M, C.dim(), {}};
  for (const auto& [P, h] : hits) t.entries.emplace(P, Rational(h, static_cast<std::int64_t>(cell.size())));
  return t;
}

/// Table of ♯_P(C|_U)/♯U for every pattern occurring in U.
inline FrequencyTable estimated_frequency_table(const Coloring& C, const FiniteSet& U, int M) {
  if (U.empty()) throw std::invalid_argument("empty set in frequency estimate");
  FrequencyTable t{M, C.dim(), {}};
  const auto n = static_cast<std::int64_t>(U.size());
  for (const auto& [P, k] : enumerate_window_patterns(C, U, M)) {
    t.entries.emplace(P, EstimatedFrequency{static_cast<double>(k) / static_cast<double>(n), n});
  }
  return t;
}

/// Σ_P |♯_P(C|_U)/♯U − ν_P| over the union of occurring and tabulated patterns.
inline double frequency_deviation_sum(const Coloring& C, const FiniteSet& U, const FrequencyTable& table) {
  const auto tally = enumerate_window_patterns(C, U, table.M);
  const double n = static_cast<double>(U.size());
  double sum = 0.0;
  for (const auto& [P, k] : tally) sum += std::abs(static_cast<double>(k) / n - table.value(P));
  for (const auto& [P, v] : table.entries) {
    if (!tally.contains(P)) sum += std::abs(frequency_value(v));
  }
  return sum;
}

}  // namespace idslab
