#pragma once

// Finite-volume magnetic Schrödinger operators on W_Q with Dirichlet
// conditions: tiled prototype fields, the finite-difference discretisation with
// Peierls link phases, facet restrictions, and the tight-binding oracle model.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "idslab/lattice.hpp"

namespace idslab {

/// Grid samples of one field component on the unit cell. resolution == 0 marks
/// a constant field whose single value is valid at every resolution.
struct FieldSamples {
  int resolution = 0;
  std::vector<double> values{0.0};

  static FieldSamples constant(double v) { return {0, {v}}; }

  /// Row-major samples at local offsets k ∈ {0..n-1}^d, axis 0 slowest.
  std::vector<double> at_resolution(int n, int d) const {
    std::size_t count = 1;
    for (int i = 0; i < d; ++i) count *= static_cast<std::size_t>(n);
    if (resolution == 0) return std::vector<double>(count, values.at(0));
    if (resolution != n) {
      throw std::invalid_argument("prototype sampled at resolution " + std::to_string(resolution) +
                                  " cannot be used at resolution " + std::to_string(n));
    }
    if (values.size() != count) throw std::invalid_argument("prototype sample count does not match n^d");
    return values;
  }

  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
  }
};

/// Electric and magnetic potential of one alphabet symbol, supported in W_0.
struct Prototype {
  FieldSamples v = FieldSamples::constant(0.0);
  std::vector<FieldSamples> a;  // empty, or one component per axis

  bool magnetic() const {
    for (const auto& comp : a)
      for (double x : comp.values)
        if (x != 0.0) return true;
    return false;
  }
};

class PrototypeLibrary {
 public:
  void add(std::string symbol, Prototype p) {
    for (const auto& f : p.a) check_finite(f);
    check_finite(p.v);
    prototypes_[std::move(symbol)] = std::move(p);
  }

  const Prototype& at(const std::string& symbol) const {
    auto it = prototypes_.find(symbol);
    if (it == prototypes_.end()) throw std::invalid_argument("missing prototype for symbol '" + symbol + "'");
    return it->second;
  }

  bool contains(const std::string& symbol) const { return prototypes_.contains(symbol); }
  const std::map<std::string, Prototype>& entries() const { return prototypes_; }

 private:
  static void check_finite(const FieldSamples& f) {
    for (double x : f.values)
      if (!std::isfinite(x)) throw std::invalid_argument("prototype samples must be finite");
  }

  std::map<std::string, Prototype> prototypes_;
};

enum class Backend { continuum, lattice };

inline std::string to_string(Backend b) { return b == Backend::continuum ? "continuum" : "lattice"; }

/// x + {y : y_j = 0, y_i ∈ [0,1] for i != j}: the face between cells x - e_j and x.
struct Facet {
  Site anchor;
  int axis = 0;
  friend auto operator<=>(const Facet&, const Facet&) = default;
};

struct OperatorSpec {
  FiniteSet cells;
  int resolution = 8;
  Coloring coloring;
  Backend backend = Backend::continuum;
  std::shared_ptr<const PrototypeLibrary> prototypes;
  std::vector<Facet> removed_facets;

  int dim() const { return cells.dim(); }
};

/// Grid samples of V and A on the points of W_Q owned by cells of Q.
/// Point coordinates are global grid indices g = n t + k.
struct GridFields {
  int resolution = 0;
  int dim = 1;
  std::vector<Site> points;  // sorted
  std::vector<double> v;
  std::vector<std::array<double, kMaxDim>> a;

  std::size_t find(const Site& g) const {
    auto it = std::lower_bound(points.begin(), points.end(), g);
    if (it == points.end() || *it != g) return points.size();
    return static_cast<std::size_t>(it - points.begin());
  }
};

namespace detail {

inline int floor_div(int a, int n) { return (a >= 0) ? a / n : -((-a + n - 1) / n); }

inline Site owner_cell(const Site& g, int n, int d) {
  Site t;
  for (int i = 0; i < d; ++i) t[i] = floor_div(g[i], n);
  return t;
}

/// Whether grid point g lies in the interior of W_Q: every cell whose closure
/// contains g must belong to Q.
inline bool interior_point(const Site& g, int n, const FiniteSet& Q) {
  const int d = Q.dim();
  Site lo = owner_cell(g, n, d);
  Site span;
  for (int i = 0; i < d; ++i) span[i] = (g[i] % n == 0) ? 1 : 0;
  bool inside = true;
  for_each_offset(d, 0, 1, [&](const Site& o) {
    if (!inside) return;
    Site t = lo;
    for (int i = 0; i < d; ++i) {
      if (o[i] > span[i]) return;
      t[i] -= o[i];
    }
    inside = Q.contains(t);
  });
  return inside;
}

inline bool on_facet(const Site& g, int n, int d, const Facet& f) {
  if (g[f.axis] != n * f.anchor[f.axis]) return false;
  for (int i = 0; i < d; ++i) {
    if (i == f.axis) continue;
    if (g[i] < n * f.anchor[i] || g[i] > n * f.anchor[i] + n) return false;
  }
  return true;
}

}  // namespace detail

inline GridFields assemble_fields(const Coloring& C, const FiniteSet& Q, const PrototypeLibrary& lib, int n) {
  const int d = Q.dim();
  if (n < 1) throw std::invalid_argument("resolution must be positive");
  if (C.dim() != d) throw std::invalid_argument("dimension mismatch between coloring and set");
  std::map<ColorId, std::pair<std::vector<double>, std::vector<std::vector<double>>>> sampled;
  for (const auto& t : Q) {
    const ColorId c = C(t);
    if (sampled.contains(c)) continue;
    const Prototype& p = lib.at(C.name(c));
    std::vector<std::vector<double>> a;
    if (!p.a.empty() && static_cast<int>(p.a.size()) != d) {
      throw std::invalid_argument("prototype '" + C.name(c) + "' has a vector potential of the wrong dimension");
    }
    for (const auto& comp : p.a) a.push_back(comp.at_resolution(n, d));
    sampled.emplace(c, std::make_pair(p.v.at_resolution(n, d), std::move(a)));
  }

  GridFields f{n, d, {}, {}, {}};
  for (const auto& t : Q) {
    const auto& [v, a] = sampled.at(C(t));
    std::size_t k_index = 0;
    for_each_offset(d, 0, n - 1, [&](const Site& k) {
      f.points.push_back(n * t + k);
      f.v.push_back(v[k_index]);
      std::array<double, kMaxDim> av{};
      for (std::size_t j = 0; j < a.size(); ++j) av[j] = a[j][k_index];
      f.a.push_back(av);
      ++k_index;
    });
  }
  // cells are visited in sorted order but their points interleave; sort jointly
  std::vector<std::size_t> order(f.points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return f.points[x] < f.points[y]; });
  GridFields out{n, d, {}, {}, {}};
  out.points.reserve(order.size());
  for (auto i : order) {
    out.points.push_back(f.points[i]);
    out.v.push_back(f.v[i]);
    out.a.push_back(f.a[i]);
  }
  return out;
}

/// Dense Hermitian matrix with the basis it acts on: grid points for the
/// continuum backend, lattice sites for the tight-binding backend.
class HermitianMatrix {
 public:
  using Real = Eigen::MatrixXd;
  using Complex = Eigen::MatrixXcd;

  HermitianMatrix(std::variant<Real, Complex> m, std::vector<Site> basis, Backend backend, int resolution, int dim)
      : m_(std::move(m)), basis_(std::move(basis)), backend_(backend), resolution_(resolution), dim_(dim) {}

  bool is_real() const { return std::holds_alternative<Real>(m_); }
  const Real& real() const { return std::get<Real>(m_); }
  const Complex& complex() const { return std::get<Complex>(m_); }
  const std::variant<Real, Complex>& data() const { return m_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(basis_.size()); }
  const std::vector<Site>& basis() const { return basis_; }
  Backend backend() const { return backend_; }
  int resolution() const { return resolution_; }
  int dim() const { return dim_; }

  Complex as_complex() const {
    return std::visit([](const auto& m) -> Complex { return m.template cast<std::complex<double>>(); }, m_);
  }

  std::size_t nonzeros() const {
    return std::visit(
        [](const auto& m) {
          std::size_t nz = 0;
          for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) nz += (m(i, j) != 0.0) ? 1 : 0;
          return nz;
        },
        m_);
  }

  /// max |H - H*|, relative to max |H|.
  double hermiticity_defect() const {
    return std::visit(
        [](const auto& m) {
          const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
          return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
        },
        m_);
  }

  bool all_finite() const {
    return std::visit([](const auto& m) { return m.allFinite(); }, m_);
  }

  /// One "row col re im" line per nonzero entry, 0-based indices.
  void write_triplets(std::ostream& os) const {
    os.precision(17);
    os << "# rows=" << size() << " cols=" << size() << " nonzeros=" << nonzeros() << "\n";
    std::visit(
        [&](const auto& m) {
          for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
              const std::complex<double> z(m(i, j));
              if (z != 0.0) os << i << ' ' << j << ' ' << z.real() << ' ' << z.imag() << '\n';
            }
        },
        m_);
  }

 private:
  std::variant<Real, Complex> m_;
  std::vector<Site> basis_;
  Backend backend_;
  int resolution_;
  int dim_;
};

/// ♯Q × ♯Q tight-binding matrix: 2d + v̄(C(x)) on the diagonal, -1 between
/// nearest neighbours of Q. A removed facet between cells x - e_j and x cuts
/// that bond; missing neighbours leave the diagonal unchanged.
inline HermitianMatrix lattice_model(const Coloring& C, const FiniteSet& Q, const PrototypeLibrary& lib,
                                     const std::vector<Facet>& cut = {}) {
  const int d = Q.dim();
  const auto N = static_cast<Eigen::Index>(Q.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
  std::map<ColorId, double> mean;
  for (Eigen::Index i = 0; i < N; ++i) {
    const Site& x = Q.sites()[static_cast<std::size_t>(i)];
    const ColorId c = C(x);
    if (!mean.contains(c)) mean[c] = lib.at(C.name(c)).v.mean();
    H(i, i) = 2.0 * d + mean[c];
    for (int j = 0; j < d; ++j) {
      const Site y = x + Site::unit(j);
      const auto k = Q.index_of(y);
      if (k == Q.size()) continue;
      if (std::find(cut.begin(), cut.end(), Facet{y, j}) != cut.end()) continue;
      H(i, static_cast<Eigen::Index>(k)) = -1.0;
      H(static_cast<Eigen::Index>(k), i) = -1.0;
    }
  }
  return HermitianMatrix(std::move(H), Q.sites(), Backend::lattice, 1, d);
}

/// Grid points kept by the continuum discretisation: interior of W_Q minus
/// points on removed facets. Sorted.
inline std::vector<Site> interior_grid_points(const OperatorSpec& spec) {
  const int n = spec.resolution;
  const int d = spec.dim();
  std::vector<Site> pts;
  for (const auto& t : spec.cells) {
    for_each_offset(d, 0, n - 1, [&](const Site& k) {
      const Site g = n * t + k;
      if (!detail::interior_point(g, n, spec.cells)) return;
      for (const auto& f : spec.removed_facets)
        if (detail::on_facet(g, n, d, f)) return;
      pts.push_back(g);
    });
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

inline void validate(const OperatorSpec& spec) {
  if (spec.cells.empty()) throw std::invalid_argument("operator domain Q is empty");
  if (!spec.prototypes) throw std::invalid_argument("operator spec has no prototype library");
  if (spec.coloring.dim() != spec.dim()) throw std::invalid_argument("coloring dimension differs from Q");
  if (spec.backend == Backend::continuum && spec.resolution < 2) {
    throw std::invalid_argument("continuum backend needs resolution >= 2");
  }
}

/// Number of rows discretize(spec) would produce, without assembling.
inline std::size_t operator_dimension(const OperatorSpec& spec) {
  if (spec.backend == Backend::lattice) return spec.cells.size();
  return interior_grid_points(spec).size();
}

inline HermitianMatrix discretize(const OperatorSpec& spec) {
  validate(spec);
  if (spec.backend == Backend::lattice) {
    return lattice_model(spec.coloring, spec.cells, *spec.prototypes, spec.removed_facets);
  }
  const int n = spec.resolution;
  const int d = spec.dim();
  const double h = 1.0 / n;
  const double hop = 1.0 / (h * h);
  const auto pts = interior_grid_points(spec);
  if (pts.empty()) throw std::invalid_argument("degenerate geometry: W_Q has no interior grid points");
  const GridFields f = assemble_fields(spec.coloring, spec.cells, *spec.prototypes, n);

  bool magnetic = false;
  for (const auto& t : spec.cells) magnetic = magnetic || spec.prototypes->at(spec.coloring.name(spec.coloring(t))).magnetic();

  const auto N = static_cast<Eigen::Index>(pts.size());
  auto fill = [&](auto& H) {
    using Scalar = typename std::decay_t<decltype(H)>::Scalar;
    for (Eigen::Index i = 0; i < N; ++i) {
      const Site& g = pts[static_cast<std::size_t>(i)];
      const auto fi = f.find(g);
      H(i, i) = Scalar(2.0 * d * hop + f.v[fi]);
      for (int j = 0; j < d; ++j) {
        const Site nb = g + Site::unit(j);
        auto it = std::lower_bound(pts.begin(), pts.end(), nb);
        if (it == pts.end() || *it != nb) continue;
        const auto k = static_cast<Eigen::Index>(it - pts.begin());
        if constexpr (std::is_same_v<Scalar, double>) {
          H(i, k) = -hop;
          H(k, i) = -hop;
        } else {
          const double a_mid = 0.5 * (f.a[fi][static_cast<std::size_t>(j)] + f.a[f.find(nb)][static_cast<std::size_t>(j)]);
          const Scalar z = -hop * std::polar(1.0, -h * a_mid);
          H(i, k) = z;
          H(k, i) = std::conj(z);
        }
      }
    }
  };
  if (!magnetic) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
    fill(H);
    return HermitianMatrix(std::move(H), pts, Backend::continuum, n, d);
  }
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(N, N);
  fill(H);
  return HermitianMatrix(std::move(H), pts, Backend::continuum, n, d);
}

/// Adds a Dirichlet condition on S. The facet must touch a cell of Q.
inline OperatorSpec add_facet_dirichlet(OperatorSpec spec, const Facet& S) {
  const int d = spec.dim();
  if (S.axis < 0 || S.axis >= d) throw std::invalid_argument("facet axis out of range");
  const Site below = S.anchor - Site::unit(S.axis);
  if (!spec.cells.contains(S.anchor) && !spec.cells.contains(below)) {
    throw std::invalid_argument("facet " + to_string(S.anchor, d) + " axis " + std::to_string(S.axis) +
                                " lies outside W_Q");
  }
  if (std::find(spec.removed_facets.begin(), spec.removed_facets.end(), S) == spec.removed_facets.end()) {
    spec.removed_facets.push_back(S);
    std::sort(spec.removed_facets.begin(), spec.removed_facets.end());
  }
  return spec;
}

/// Facets separating cells of different blocks of a partition of Q.
inline std::vector<Facet> separating_facets(std::span<const FiniteSet> partition) {
  std::map<Site, std::size_t> block;
  int d = 1;
  for (std::size_t b = 0; b < partition.size(); ++b) {
    d = partition[b].dim();
    for (const auto& x : partition[b]) block[x] = b;
  }
  std::vector<Facet> out;
  for (const auto& [x, b] : block) {
    for (int j = 0; j < d; ++j) {
      auto it = block.find(x + Site::unit(j));
      if (it != block.end() && it->second != b) out.push_back(Facet{x + Site::unit(j), j});
    }
  }
  return out;
}

}  // namespace idslab
