#pragma once

// Spectral shift functions of facet restrictions, singular values of the
// heat-semigroup difference, decay-law fitting, and the Legendre/Young bounds
// that turn singular-value decay into integral SSF estimates.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "idslab/operator.hpp"
#include "idslab/spectral.hpp"

namespace idslab {

/// ξ = N(·, A) − N(·, B) with B the more restricted operator.
struct SpectralShift {
  StepFunction xi;
};

inline void check_facet_pair(const OperatorSpec& A, const OperatorSpec& B) {
  const bool same = A.cells == B.cells && A.resolution == B.resolution && A.backend == B.backend &&
                    A.prototypes == B.prototypes && A.coloring.describe() == B.coloring.describe();
  bool superset = true;
  for (const auto& f : A.removed_facets) {
    superset = superset && std::find(B.removed_facets.begin(), B.removed_facets.end(), f) != B.removed_facets.end();
  }
  if (!same || !superset) throw std::invalid_argument("operator pair is not related by facet restriction");
}

inline StepFunction counting_function(const OperatorSpec& spec, const EnergyWindow& I) {
  return counting_function(eigenvalues(discretize(spec), I.hi), I);
}

inline SpectralShift spectral_shift(const OperatorSpec& A, const OperatorSpec& B, const EnergyWindow& I) {
  check_facet_pair(A, B);
  return {counting_function(A, I) - counting_function(B, I)};
}

/// Decreasing singular values μ_1 >= μ_2 >= ... . `complete` marks a series
/// holding every singular value of a finite matrix.
struct SingularValueSeries {
  std::vector<double> mu;
  bool complete = false;
  std::string source;
  int resolution = 0;
};

namespace detail {

template <class M>
M semigroup(const M& H, double t) {
  Eigen::SelfAdjointEigenSolver<M> es(H);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen decomposition failed");
  const Eigen::VectorXd w = (-t * es.eigenvalues().array()).exp();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Top m singular values of e^{-t H_B} − e^{-t H_A}. The restricted
/// semigroup is extended by zero on grid points removed in B.
inline SingularValueSeries veff_singular_values(const OperatorSpec& A, const OperatorSpec& B, std::size_t m,
                                                double t = 1.0, std::size_t dimension_cap = 3000) {
  check_facet_pair(A, B);
  const HermitianMatrix HA = discretize(A);
  const HermitianMatrix HB = discretize(B);
  if (static_cast<std::size_t>(HA.size()) > dimension_cap) {
    throw std::invalid_argument("operator dimension " + std::to_string(HA.size()) + " exceeds cap " +
                                std::to_string(dimension_cap));
  }
  std::vector<Eigen::Index> embed(static_cast<std::size_t>(HB.size()));
  for (std::size_t i = 0; i < embed.size(); ++i) {
    auto it = std::lower_bound(HA.basis().begin(), HA.basis().end(), HB.basis()[i]);
    if (it == HA.basis().end() || *it != HB.basis()[i]) throw std::logic_error("restricted basis is not a subset");
    embed[i] = it - HA.basis().begin();
  }
  auto diff_singular = [&](const auto& a, const auto& b) -> Eigen::VectorXd {
    using M = std::decay_t<decltype(a)>;
    M D = -detail::semigroup(a, t);
    const M SB = detail::semigroup(b, t);
    for (Eigen::Index j = 0; j < SB.cols(); ++j)
      for (Eigen::Index i = 0; i < SB.rows(); ++i)
        D(embed[static_cast<std::size_t>(i)], embed[static_cast<std::size_t>(j)]) += SB(i, j);
    Eigen::SelfAdjointEigenSolver<M> es(D, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs();
  };
  Eigen::VectorXd s = (HA.is_real() && HB.is_real()) ? diff_singular(HA.real(), HB.real())
                                                     : diff_singular(HA.as_complex(), HB.as_complex());
  std::vector<double> mu(s.data(), s.data() + s.size());
  std::sort(mu.begin(), mu.end(), std::greater<>());
  SingularValueSeries out;
  out.complete = m >= mu.size();
  if (mu.size() > m) mu.resize(m);
  out.mu = std::move(mu);
  out.source = to_string(A.backend) + " facets " + std::to_string(A.removed_facets.size()) + "->" +
               std::to_string(B.removed_facets.size());
  out.resolution = A.resolution;
  return out;
}

struct DecayFit {
  double c_hat = 0.0;
  double C2_hat = 0.0;
  double max_residual = 0.0;  // max signed residual of log μ_n
  double C2_inflated = 0.0;   // C2_hat·exp(max(0, max_residual))
  double epsilon = 0.05;
  std::size_t points = 0;
  bool envelope_holds = false;

  double envelope(std::size_t n, int d) const {
    return (1.0 + epsilon) * C2_inflated * std::exp(-c_hat * std::pow(static_cast<double>(n), 1.0 / d));
  }
};

/// Least squares of log μ_n against −n^{1/d} over μ_n above the floor.
inline DecayFit fit_decay(const SingularValueSeries& s, int d, double floor = 1e-13, double epsilon = 0.05) {
  check_dimension(d);
  std::vector<double> x, y;
  for (std::size_t n = 1; n <= s.mu.size(); ++n) {
    if (s.mu[n - 1] > floor) {
      x.push_back(std::pow(static_cast<double>(n), 1.0 / d));
      y.push_back(std::log(s.mu[n - 1]));
    }
  }
  if (x.size() < 10) {
    throw std::invalid_argument("decay fit needs >= 10 singular values above " + std::to_string(floor) + ", got " +
                                std::to_string(x.size()));
  }
  const auto k = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd X(k, 2);
  Eigen::VectorXd Y(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = -x[static_cast<std::size_t>(i)];
    Y(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d beta = X.colPivHouseholderQr().solve(Y);
  DecayFit f;
  f.c_hat = beta(1);
  f.C2_hat = std::exp(beta(0));
  f.epsilon = epsilon;
  f.points = x.size();
  f.max_residual = (Y - X * beta).maxCoeff();
  f.C2_inflated = f.C2_hat * std::exp(std::max(0.0, f.max_residual));
  f.envelope_holds = f.c_hat > 0.0;
  for (std::size_t n = 1; n <= s.mu.size(); ++n) {
    if (s.mu[n - 1] > floor) f.envelope_holds = f.envelope_holds && s.mu[n - 1] <= f.envelope(n, d);
  }
  return f;
}

/// Convex F: [0, ∞) → [0, ∞) with F(0) = 0.
class ConvexGauge {
 public:
  struct PowerLaw {
    double q;  // F(x) = x^{q+1}
  };
  struct Exponential {
    double t, p;  // F(x) = ∫_0^x (e^{t y^p} − 1) dy
  };
  struct Tabulated {
    std::vector<double> x, F;  // piecewise linear, extended with the last slope
  };

  static ConvexGauge power_law(double q) {
    if (!(q >= 0.0)) throw std::invalid_argument("power-law exponent q must be >= 0");
    return ConvexGauge(PowerLaw{q});
  }
  /// F(x) = x^p.
  static ConvexGauge monomial(double p) { return power_law(p - 1.0); }
  static ConvexGauge exponential(double t, double p) {
    if (!(t > 0.0) || !(p > 0.0)) throw std::invalid_argument("exponential gauge needs t, p > 0");
    return ConvexGauge(Exponential{t, p});
  }
  static ConvexGauge tabulated(std::vector<double> x, std::vector<double> F) {
    if (x.size() != F.size() || x.size() < 2) throw std::invalid_argument("tabulated gauge needs >= 2 samples");
    if (x.front() != 0.0 || F.front() != 0.0) throw std::invalid_argument("tabulated gauge must start at F(0) = 0");
    double prev_slope = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (!(x[i] > x[i - 1])) throw std::invalid_argument("tabulated abscissae must increase");
      const double slope = (F[i] - F[i - 1]) / (x[i] - x[i - 1]);
      if (slope < -1e-12) throw std::invalid_argument("tabulated gauge must be nondecreasing");
      if (slope < prev_slope - 1e-12 * std::max(1.0, std::abs(prev_slope))) {
        throw std::invalid_argument("tabulated gauge is not convex");
      }
      prev_slope = slope;
    }
    return ConvexGauge(Tabulated{std::move(x), std::move(F)});
  }

  double operator()(double x) const {
    if (x < 0.0) throw std::domain_error("convex gauge evaluated at negative argument");
    return std::visit(
        [x](const auto& g) -> double {
          using G = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<G, PowerLaw>) {
            return std::pow(x, g.q + 1.0);
          } else if constexpr (std::is_same_v<G, Exponential>) {
            if (x == 0.0) return 0.0;
            auto integrand = [&g](double y) { return std::expm1(g.t * std::pow(y, g.p)); };
            return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, x, 15, 1e-13);
          } else {
            const auto& xs = g.x;
            auto it = std::upper_bound(xs.begin(), xs.end(), x);
            std::size_t i = (it == xs.end()) ? xs.size() - 1 : static_cast<std::size_t>(it - xs.begin());
            i = std::max<std::size_t>(i, 1);
            const double slope = (g.F[i] - g.F[i - 1]) / (xs[i] - xs[i - 1]);
            return g.F[i - 1] + slope * (x - xs[i - 1]);
          }
        },
        kind_);
  }

  const std::variant<PowerLaw, Exponential, Tabulated>& kind() const { return kind_; }

 private:
  explicit ConvexGauge(std::variant<PowerLaw, Exponential, Tabulated> k) : kind_(std::move(k)) {}
  std::variant<PowerLaw, Exponential, Tabulated> kind_;
};

struct LegendreValue {
  double value = 0.0;
  bool bounded = true;
};

/// G(y) = sup{xy − F(x) | x >= 0}.
class LegendreTransform {
 public:
  explicit LegendreTransform(ConvexGauge F) : F_(std::move(F)) {}

  LegendreValue operator()(double y) const {
    if (y < 0.0) throw std::domain_error("Legendre transform evaluated at negative argument");
    return std::visit(
        [&](const auto& g) -> LegendreValue {
          using G = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<G, ConvexGauge::PowerLaw>) {
            if (g.q == 0.0) return y <= 1.0 ? LegendreValue{0.0, true} : LegendreValue{0.0, false};
            return {g.q * std::pow(y / (g.q + 1.0), (g.q + 1.0) / g.q), true};
          } else if constexpr (std::is_same_v<G, ConvexGauge::Exponential>) {
            // f = F' = e^{t x^p} − 1, f(0) = 0, so G(y) = y f^{-1}(y) − F(f^{-1}(y))
            if (y == 0.0) return {0.0, true};
            const double xs = inverse_derivative(g, y);
            return {y * xs - F_(xs), true};
          } else {
            const auto& xs = g.x;
            const auto& Fs = g.F;
            const double last_slope = (Fs.back() - Fs[Fs.size() - 2]) / (xs.back() - xs[xs.size() - 2]);
            if (y > last_slope) return {0.0, false};
            double best = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) best = std::max(best, xs[i] * y - Fs[i]);
            return {best, true};
          }
        },
        F_.kind());
  }

  /// y·f^{-1}(y) = y (log(1+y)/t)^{1/p}, an upper bound for the exponential gauge.
  double exponential_upper_bound(double y) const {
    const auto* g = std::get_if<ConvexGauge::Exponential>(&F_.kind());
    if (!g) throw std::logic_error("upper bound evaluator applies to the exponential gauge only");
    return y * inverse_derivative(*g, y);
  }

  const ConvexGauge& gauge() const { return F_; }

 private:
  static double inverse_derivative(const ConvexGauge::Exponential& g, double y) {
    return std::pow(std::log1p(y) / g.t, 1.0 / g.p);
  }
  ConvexGauge F_;
};

inline LegendreTransform legendre(const ConvexGauge& F) { return LegendreTransform(F); }

struct HsBound {
  double value = 0.0;
  bool converged = true;
};

/// e^T Σ_n φ(n) μ_n with φ(n) = F(n) − F(n−1). A complete series is an exact
/// finite sum; otherwise the last term must be below 1e-14 of the total.
inline HsBound hs_bound(const SingularValueSeries& s, const ConvexGauge& F, double T) {
  double sum = 0.0;
  double last = 0.0;
  double prev = 0.0;
  for (std::size_t n = 1; n <= s.mu.size(); ++n) {
    const double Fn = F(static_cast<double>(n));
    last = (Fn - prev) * s.mu[n - 1];
    sum += last;
    prev = Fn;
  }
  HsBound b;
  b.value = std::exp(T) * sum;
  b.converged = s.complete || last <= 1e-14 * std::max(sum, std::numeric_limits<double>::min());
  if (!std::isfinite(b.value)) b.converged = false;
  return b;
}

struct YoungCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const { return lhs <= rhs; }
};

/// lhs = ∫_I h ξ, rhs = hs + ∫_I G(|h|).
inline YoungCheck young_check(const StepFunction& h, const StepFunction& xi, const ConvexGauge& F, double hs,
                              const EnergyWindow& I) {
  const LegendreTransform G(F);
  YoungCheck r;
  r.lhs = integrate(h * xi, I);
  double g_int = 0.0;
  bool bounded = true;
  for_each_piece(h, I, [&](double a, double b, double v) {
    const auto gv = G(std::abs(v));
    if (!gv.bounded) {
      bounded = false;
      return;
    }
    g_int += gv.value * (b - a);
  });
  r.rhs = bounded ? hs + g_int : std::numeric_limits<double>::infinity();
  return r;
}

/// min_n [E_n − (2π(1−δ)d/e)(n/|U|)^{2/d} + C1]; +inf for an empty list.
inline double weyl_check(const std::vector<double>& eigs, double volume, double delta, double C1, int d) {
  if (!std::is_sorted(eigs.begin(), eigs.end())) throw std::invalid_argument("eigenvalues must be sorted");
  const double a = 2.0 * std::numbers::pi * (1.0 - delta) * d / std::numbers::e;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n <= eigs.size(); ++n) {
    margin = std::min(margin, eigs[n - 1] - a * std::pow(static_cast<double>(n) / volume, 2.0 / d) + C1);
  }
  return margin;
}

/// C̃ with C̃^p = e^T Σ_n C2 p n^{p−1} e^{−c n^{1/d}}.
inline double ssf_bound_constant(double C2, double c, int d, double p, double T) {
  if (!(c > 0.0)) throw std::invalid_argument("decay rate must be positive");
  double sum = 0.0;
  for (std::size_t n = 1;; ++n) {
    const double x = static_cast<double>(n);
    const double term = C2 * p * std::pow(x, p - 1.0) * std::exp(-c * std::pow(x, 1.0 / d));
    sum += term;
    if (n > 8 && term < 1e-16 * sum) break;
    if (n > 100000000) throw std::runtime_error("SSF bound series does not converge");
  }
  return std::pow(std::exp(T) * sum, 1.0 / p);
}

/// One facet restriction: ξ, singular values, decay fit and (e:HS)-type bounds.
struct FacetExperiment {
  std::string label;
  int dim = 1;
  std::size_t matrix_dim = 0;
  EnergyWindow window;
  SpectralShift shift;
  SingularValueSeries series;
  std::optional<DecayFit> fit;
  std::string fit_error;
  std::vector<double> exponents;  // p values for the HS comparison
  std::vector<double> direct;     // ∫_{-inf}^T |ξ|^p
  std::vector<HsBound> bounds;    // e^T <φ, μ> for F(x) = x^p
};

/// ∫_{-inf}^{T} |ξ|^p for a step function that vanishes far below the spectrum.
inline double lower_tail_integral(const StepFunction& xi, double T, double p) {
  double s = 0.0;
  const auto& b = xi.breakpoints();
  if (xi.base_value() != 0.0) return std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (b[k] >= T) break;
    const double end = (k + 1 < b.size()) ? std::min(b[k + 1], T) : T;
    s += std::pow(std::abs(xi.values()[k + 1]), p) * (end - b[k]);
  }
  return s;
}

inline FacetExperiment run_facet_experiment(std::string label, const OperatorSpec& A, const OperatorSpec& B,
                                            const EnergyWindow& I, std::vector<double> exponents,
                                            std::size_t dimension_cap = 3000, double floor = 1e-13) {
  FacetExperiment e;
  e.label = std::move(label);
  e.dim = A.dim();
  e.window = I;
  e.matrix_dim = operator_dimension(A);
  // ξ must be exact down to -inf: take the window from below the spectrum
  const EnergyWindow full(std::min(I.lo, -1e6), I.hi, I.p);
  e.shift = spectral_shift(A, B, full);
  e.series = veff_singular_values(A, B, std::numeric_limits<std::size_t>::max(), 1.0, dimension_cap);
  try {
    e.fit = fit_decay(e.series, A.dim(), floor);
  } catch (const std::invalid_argument& err) {
    e.fit_error = err.what();
  }
  e.exponents = std::move(exponents);
  for (double p : e.exponents) {
    e.direct.push_back(lower_tail_integral(e.shift.xi, I.hi, p));
    e.bounds.push_back(hs_bound(e.series, ConvexGauge::monomial(p), I.hi));
  }
  return e;
}

}  // namespace idslab
