#pragma once

// Eigenvalues, eigenvalue counting functions and exact L^p(I) arithmetic on
// right-continuous step functions.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "idslab/operator.hpp"

namespace idslab {

/// Closed finite energy interval with an integrability exponent.
struct EnergyWindow {
  double lo = 0.0;
  double hi = 1.0;
  double p = 2.0;

  EnergyWindow() = default;
  EnergyWindow(double lo_, double hi_, double p_ = 2.0) : lo(lo_), hi(hi_), p(p_) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("energy window needs lo < hi");
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must be in [1, inf)");
  }
  double length() const { return hi - lo; }
};

/// Right-continuous piecewise constant function on R: values[0] on
/// (-inf, b_0), values[k] on [b_{k-1}, b_k), values.back() on [b_last, inf).
class StepFunction {
 public:
  StepFunction() : values_{0.0} {}
  explicit StepFunction(double constant) : values_{constant} {}
  StepFunction(std::vector<double> breakpoints, std::vector<double> values)
      : breaks_(std::move(breakpoints)), values_(std::move(values)) {
    if (values_.size() != breaks_.size() + 1) throw std::invalid_argument("step function needs one more value than breakpoints");
    for (std::size_t i = 1; i < breaks_.size(); ++i)
      if (!(breaks_[i - 1] < breaks_[i])) throw std::invalid_argument("breakpoints must be strictly increasing");
    for (double b : breaks_)
      if (!std::isfinite(b)) throw std::invalid_argument("breakpoints must be finite");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("step values must be finite");
  }

  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  double base_value() const { return values_.front(); }

  double operator()(double x) const {
    const auto k = std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin();
    return values_[static_cast<std::size_t>(k)];
  }

  /// Left limit at x.
  double left_limit(double x) const {
    const auto k = std::lower_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin();
    return values_[static_cast<std::size_t>(k)];
  }

  /// Drops breakpoints where the value does not change.
  StepFunction simplified() const {
    std::vector<double> b;
    std::vector<double> v{values_.front()};
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
      if (values_[i + 1] != v.back()) {
        b.push_back(breaks_[i]);
        v.push_back(values_[i + 1]);
      }
    }
    return StepFunction(std::move(b), std::move(v));
  }

  template <class Op>
  friend StepFunction combine(const StepFunction& f, const StepFunction& g, Op op) {
    std::vector<double> b;
    b.reserve(f.breaks_.size() + g.breaks_.size());
    std::merge(f.breaks_.begin(), f.breaks_.end(), g.breaks_.begin(), g.breaks_.end(), std::back_inserter(b));
    b.erase(std::unique(b.begin(), b.end()), b.end());
    std::vector<double> v;
    v.reserve(b.size() + 1);
    v.push_back(op(f.values_.front(), g.values_.front()));
    for (double x : b) v.push_back(op(f(x), g(x)));
    return StepFunction(std::move(b), std::move(v));
  }

  friend StepFunction operator+(const StepFunction& f, const StepFunction& g) {
    return combine(f, g, [](double a, double b) { return a + b; });
  }
  friend StepFunction operator-(const StepFunction& f, const StepFunction& g) {
    return combine(f, g, [](double a, double b) { return a - b; });
  }
  friend StepFunction operator*(const StepFunction& f, const StepFunction& g) {
    return combine(f, g, [](double a, double b) { return a * b; });
  }

  template <class Fn>
  StepFunction map(Fn fn) const {
    std::vector<double> v;
    v.reserve(values_.size());
    for (double x : values_) v.push_back(fn(x));
    return StepFunction(breaks_, std::move(v));
  }

  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

/// Pointwise multiplication by a positive factor.
inline StepFunction scale(const StepFunction& f, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
  return f.map([factor](double x) { return x * factor; });
}

/// Calls fn(a, b, value) for each maximal interval [a, b) ⊆ I of constant value.
template <class Fn>
void for_each_piece(const StepFunction& f, const EnergyWindow& I, Fn&& fn) {
  double a = I.lo;
  for (std::size_t k = 0; k < f.breakpoints().size(); ++k) {
    const double b = f.breakpoints()[k];
    if (b <= a) continue;
    if (b >= I.hi) break;
    fn(a, b, f(a));
    a = b;
  }
  fn(a, I.hi, f(a));
}

/// ∫_I g(f(λ)) dλ, exact for step functions.
template <class Fn>
double integrate(const StepFunction& f, const EnergyWindow& I, Fn&& g) {
  double s = 0.0;
  for_each_piece(f, I, [&](double a, double b, double v) { s += g(v) * (b - a); });
  return s;
}

inline double integrate(const StepFunction& f, const EnergyWindow& I) {
  return integrate(f, I, [](double v) { return v; });
}

inline double lp_norm(const StepFunction& f, const EnergyWindow& I) {
  const double s = integrate(f, I, [&](double v) { return std::pow(std::abs(v), I.p); });
  return std::pow(s, 1.0 / I.p);
}

/// (∫_I |f - g|^p dλ)^{1/p}, merged-breakpoint summation.
inline double lp_distance(const StepFunction& f, const StepFunction& g, const EnergyWindow& I) {
  return lp_norm(f - g, I);
}

/// sup over I of |f - g| for a continuous monotone g; extremes occur at
/// breakpoints (both one-sided limits) or at the window ends.
template <class G>
double sup_deviation_monotone(const StepFunction& f, G&& g, const EnergyWindow& I) {
  double worst = std::max(std::abs(f(I.lo) - g(I.lo)), std::abs(f.left_limit(I.hi) - g(I.hi)));
  worst = std::max(worst, std::abs(f(I.hi) - g(I.hi)));
  for (double b : f.breakpoints()) {
    if (b < I.lo || b > I.hi) continue;
    worst = std::max({worst, std::abs(f(b) - g(b)), std::abs(f.left_limit(b) - g(b))});
  }
  return worst;
}

/// All eigenvalues <= ceiling, ascending with multiplicity (full dense decomposition).
inline std::vector<double> eigenvalues(const HermitianMatrix& H,
                                       double ceiling = std::numeric_limits<double>::infinity()) {
  if (!H.all_finite()) throw std::invalid_argument("matrix has non-finite entries");
  Eigen::VectorXd ev = std::visit(
      [](const auto& m) -> Eigen::VectorXd {
        using M = std::decay_t<decltype(m)>;
        Eigen::SelfAdjointEigenSolver<M> es(m, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue decomposition failed");
        return es.eigenvalues();
      },
      H.data());
  std::vector<double> out;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] <= ceiling) out.push_back(ev[i]);
  std::sort(out.begin(), out.end());
  return out;
}

/// Eigenvalues and orthonormal eigenvectors (columns), ascending.
struct EigenPairs {
  Eigen::VectorXd values;
  std::variant<Eigen::MatrixXd, Eigen::MatrixXcd> vectors;

  /// |ψ_k(i)|² for basis index i and eigenvector k.
  double weight(Eigen::Index i, Eigen::Index k) const {
    return std::visit([&](const auto& v) { return std::norm(std::complex<double>(v(i, k))); }, vectors);
  }
};

inline EigenPairs eigenpairs(const HermitianMatrix& H) {
  if (!H.all_finite()) throw std::invalid_argument("matrix has non-finite entries");
  return std::visit(
      [](const auto& m) -> EigenPairs {
        using M = std::decay_t<decltype(m)>;
        Eigen::SelfAdjointEigenSolver<M> es(m);
        if (es.info() != Eigen::Success) throw std::runtime_error("eigen decomposition failed");
        return EigenPairs{es.eigenvalues(), M(es.eigenvectors())};
      },
      H.data());
}

/// ♯{eigenvalues <= T} from the inertia of H - T·Id (LDLᵀ, Sylvester's law).
inline std::size_t inertia_count(const HermitianMatrix& H, double T) {
  return std::visit(
      [T](const auto& m) -> std::size_t {
        using M = std::decay_t<decltype(m)>;
        M shifted = m;
        shifted.diagonal().array() -= T;
        Eigen::LDLT<M> ldlt(shifted);
        std::size_t count = 0;
        const auto D = ldlt.vectorD();
        for (Eigen::Index i = 0; i < D.size(); ++i) count += (std::real(D[i]) <= 0.0) ? 1 : 0;
        return count;
      },
      H.data());
}

/// λ ↦ ♯{k : λ_k <= λ} with jumps at eigenvalues inside I and base value
/// ♯{k : λ_k < λ_min}.
inline StepFunction counting_function(const std::vector<double>& eigs, const EnergyWindow& I) {
  if (!std::is_sorted(eigs.begin(), eigs.end())) throw std::invalid_argument("eigenvalues must be sorted");
  std::vector<double> b;
  std::vector<double> v;
  std::size_t k = 0;
  while (k < eigs.size() && eigs[k] < I.lo) ++k;
  v.push_back(static_cast<double>(k));
  while (k < eigs.size() && eigs[k] <= I.hi) {
    const double e = eigs[k];
    while (k < eigs.size() && eigs[k] == e) ++k;
    b.push_back(e);
    v.push_back(static_cast<double>(k));
  }
  return StepFunction(std::move(b), std::move(v));
}

/// Nondecreasing, integer-valued, nonnegative.
inline bool is_counting_function(const StepFunction& f) {
  double prev = -1.0;
  for (double v : f.values()) {
    if (v < 0.0 || v != std::floor(v) || v < prev) return false;
    prev = v;
  }
  return true;
}

/// CSV with a metadata header; the first data row carries the base value at -inf.
inline void write_csv(std::ostream& os, const StepFunction& f, const EnergyWindow& I, const std::string& normalization) {
  os.precision(17);
  os << "# I=[" << I.lo << "," << I.hi << "] p=" << I.p << " normalization=" << normalization << "\n";
  os << "breakpoint,value\n";
  os << "-inf," << f.base_value() << "\n";
  for (std::size_t k = 0; k < f.breakpoints().size(); ++k) os << f.breakpoints()[k] << "," << f.values()[k + 1] << "\n";
}

}  // namespace idslab
