#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "idslab/ssf.hpp"

using namespace idslab;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

OperatorSpec free_chain(int L, int n) {
  auto lib = std::make_shared<PrototypeLibrary>();
  lib->add("a", Prototype{});
  return OperatorSpec{cube(L, 1), n, Coloring::constant(1, {"a"}, ColorId{0}), Backend::continuum, lib, {}};
}

OperatorSpec cut(OperatorSpec s, std::initializer_list<int> at) {
  for (int x : at) s = add_facet_dirichlet(s, Facet{Site(x), 0});
  return s;
}

SingularValueSeries synthetic(double C2, double c, int count) {
  SingularValueSeries s;
  for (int n = 1; n <= count; ++n) s.mu.push_back(C2 * std::exp(-c * n));
  s.complete = true;
  return s;
}

// sup_{x in grid} (x y − F(x))
template <class F>
double grid_sup(F&& f, double y, double xmax, double step) {
  double best = 0.0;
  for (double x = 0.0; x <= xmax; x += step) best = std::max(best, x * y - f(x));
  return best;
}

StepFunction random_h(std::mt19937_64& rng, const EnergyWindow& I) {
  std::uniform_real_distribution<double> u(I.lo, I.hi), v(-1.0, 1.0);
  std::vector<double> b(6);
  for (auto& x : b) x = u(rng);
  std::sort(b.begin(), b.end());
  std::vector<double> vals(7);
  for (auto& x : vals) x = v(rng);
  return StepFunction(b, vals);
}

}  // namespace

TEST(SpectralShift, IdenticalOperatorsGiveZero) {
  const auto s = free_chain(3, 8);
  const auto xi = spectral_shift(s, s, EnergyWindow(0, 100)).xi;
  for (double v : xi.values()) EXPECT_EQ(v, 0.0);
}

TEST(SpectralShift, IntervalSplitInTheMiddle) {
  const int n = 32;
  const auto A = free_chain(2, n);
  const auto B = cut(A, {1});
  const EnergyWindow I(0, 10);
  const auto xi = spectral_shift(A, B, I).xi;
  // A: (kπ/2)² approximated by (2/h²)(1−cos(kπh/2)); B: two copies of (kπ)²
  const double h = 1.0 / n;
  const double a1 = 2 / (h * h) * (1 - std::cos(std::numbers::pi * h / 2));
  const double a2 = 2 / (h * h) * (1 - std::cos(std::numbers::pi * h));
  EXPECT_NEAR(a1, kPi2 / 4, 0.01);
  EXPECT_NEAR(a2, kPi2, 0.01);
  EXPECT_EQ(xi(0.0), 0.0);
  EXPECT_EQ(xi(a1 - 1e-9), 0.0);
  EXPECT_EQ(xi(a1 + 1e-9), 1.0);
  EXPECT_EQ(xi(a2 - 1e-9), 1.0);
  EXPECT_EQ(xi(a2 + 1e-9), 0.0);
  EXPECT_EQ(xi(10.0), 0.0);
  EXPECT_NEAR(integrate(xi, I), a2 - a1, 1e-9);
}

TEST(SpectralShift, TwoFacetsTelescope) {
  const auto A = free_chain(4, 6);
  const EnergyWindow I(-1, 300);
  const auto one = cut(A, {1});
  const auto both = cut(A, {1, 3});
  const auto total = spectral_shift(A, both, I).xi;
  const auto chain = spectral_shift(A, one, I).xi + spectral_shift(one, both, I).xi;
  EXPECT_LT(lp_distance(total, chain, I), 1e-6);
  EXPECT_THROW(spectral_shift(both, A, I), std::invalid_argument);
}

TEST(Veff, IdenticalOperatorsGiveZero) {
  const auto s = free_chain(2, 6);
  const auto series = veff_singular_values(s, s, 50);
  for (double m : series.mu) EXPECT_EQ(m, 0.0);
}

TEST(Veff, SingleFacetDecays) {
  const auto A = free_chain(16, 8);
  const auto series = veff_singular_values(A, cut(A, {8}), 1000);
  EXPECT_TRUE(series.complete);
  ASSERT_GT(series.mu.size(), 10u);
  EXPECT_GT(series.mu[0], 0.0);
  EXPECT_TRUE(std::is_sorted(series.mu.rbegin(), series.mu.rend()));
  EXPECT_LT(series.mu.back(), 1e-10);
  const auto fit = fit_decay(series, 1);
  EXPECT_GT(fit.c_hat, 0.0);
  EXPECT_TRUE(fit.envelope_holds);
}

TEST(Veff, SeparatedFacetsMergeTheirSeries) {
  const auto A = free_chain(24, 4);
  const auto s1 = veff_singular_values(A, cut(A, {6}), 1000);
  const auto s2 = veff_singular_values(A, cut(A, {18}), 1000);
  const auto both = veff_singular_values(A, cut(A, {6, 18}), 1000);
  std::vector<double> merged = s1.mu;
  merged.insert(merged.end(), s2.mu.begin(), s2.mu.end());
  std::sort(merged.begin(), merged.end(), std::greater<>());
  for (std::size_t k = 0; k < 20; ++k) EXPECT_NEAR(both.mu[k], merged[k], 1e-6) << k;
}

TEST(FitDecay, RecoversSyntheticLaw) {
  const auto fit = fit_decay(synthetic(3.0, 0.7, 40), 1);
  EXPECT_NEAR(fit.c_hat, 0.7, 1e-10);
  EXPECT_NEAR(fit.C2_hat, 3.0, 1e-9);
  EXPECT_NEAR(fit.max_residual, 0.0, 1e-10);
  EXPECT_EQ(fit.points, 40u);
  EXPECT_TRUE(fit.envelope_holds);
}

TEST(FitDecay, InflatesToCoverResiduals) {
  auto s = synthetic(2.0, 0.5, 30);
  s.mu[4] *= 1.5;
  const auto fit = fit_decay(s, 1);
  EXPECT_GT(fit.max_residual, 0.0);
  for (std::size_t n = 1; n <= s.mu.size(); ++n) EXPECT_LE(s.mu[n - 1], fit.envelope(n, 1));
}

TEST(FitDecay, DegenerateSeriesThrows) {
  SingularValueSeries s;
  s.mu = std::vector<double>(30, 0.0);
  s.mu[0] = 1.0;
  EXPECT_THROW(fit_decay(s, 1), std::invalid_argument);
}

TEST(Legendre, QuadraticClosedForm) {
  const auto G = legendre(ConvexGauge::power_law(1.0));
  for (double y : {0.0, 0.5, 1.0, 3.0, 10.0}) {
    const auto g = G(y);
    EXPECT_TRUE(g.bounded);
    EXPECT_NEAR(g.value, y * y / 4, 1e-12);
  }
}

TEST(Legendre, LinearTabulatedGauge) {
  const auto G = legendre(ConvexGauge::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}));
  EXPECT_TRUE(G(0.3).bounded);
  EXPECT_EQ(G(0.3).value, 0.0);
  EXPECT_EQ(G(1.0).value, 0.0);
  EXPECT_FALSE(G(1.0001).bounded);
  EXPECT_FALSE(legendre(ConvexGauge::power_law(0.0))(2.0).bounded);
}

TEST(Legendre, PowerLawMatchesGridSupremum) {
  for (double q : {0.5, 1.0, 2.0}) {
    const auto F = ConvexGauge::power_law(q);
    const auto G = legendre(F);
    for (double y : {0.25, 1.0, 2.0, 4.0}) {
      const double s = grid_sup([&](double x) { return F(x); }, y, 20.0, 1e-4);
      EXPECT_NEAR(G(y).value, s, 1e-6) << "q=" << q << " y=" << y;
    }
  }
}

TEST(Legendre, ExponentialGaugeBrackets) {
  const auto F = ConvexGauge::exponential(1.0, 2.0);
  const auto G = legendre(F);
  for (double y : {0.5, 2.0, 6.0}) {
    const double g = G(y).value;
    EXPECT_LE(g, G.exponential_upper_bound(y) + 1e-12);
    for (double x = 0.0; x <= 2.0; x += 0.1) EXPECT_GE(g, x * y - F(x) - 1e-9);
  }
  // F(x) = ∫_0^x (e^{y²} − 1) dy, checked at x = 1 against a Simpson rule
  double simpson = 0.0;
  const int m = 2000;
  for (int i = 0; i <= m; ++i) {
    const double y = static_cast<double>(i) / m;
    const double w = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
    simpson += w * std::expm1(y * y);
  }
  EXPECT_NEAR(F(1.0), simpson / (3.0 * m), 1e-10);
}

TEST(Legendre, FenchelYoungOnAGrid) {
  for (double q : {0.5, 1.0, 3.0}) {
    const auto F = ConvexGauge::power_law(q);
    const auto G = legendre(F);
    for (double x = 0.0; x <= 5.0; x += 0.25)
      for (double y = 0.0; y <= 5.0; y += 0.25) EXPECT_LE(x * y, F(x) + G(y).value + 1e-9);
  }
}

TEST(ConvexGauge, RejectsBadTables) {
  EXPECT_THROW(ConvexGauge::tabulated({0.0, 1.0, 2.0}, {0.0, 2.0, 3.0}), std::invalid_argument);
  EXPECT_THROW(ConvexGauge::tabulated({0.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(ConvexGauge::power_law(-1.0), std::invalid_argument);
  EXPECT_THROW(ConvexGauge::power_law(1.0)(-1.0), std::domain_error);
}

TEST(HsBound, Examples) {
  SingularValueSeries zero;
  zero.mu = std::vector<double>(5, 0.0);
  zero.complete = true;
  EXPECT_EQ(hs_bound(zero, ConvexGauge::power_law(1.0), 3.0).value, 0.0);
  SingularValueSeries one;
  one.mu = {1.0};
  one.complete = true;
  EXPECT_EQ(hs_bound(one, ConvexGauge::power_law(1.0), 0.0).value, 1.0);
  // e^T Σ (2n−1) μ_n with μ = (1, 1/2)
  one.mu = {1.0, 0.5};
  EXPECT_DOUBLE_EQ(hs_bound(one, ConvexGauge::monomial(2.0), 1.0).value, std::exp(1.0) * 2.5);
}

TEST(HsBound, DominatesDirectIntegralOnFacetExperiment) {
  const auto A = free_chain(16, 8);
  const auto e = run_facet_experiment("chain", A, cut(A, {8}), EnergyWindow(0, 60), {1.0, 2.0, 3.0});
  ASSERT_EQ(e.direct.size(), 3u);
  ASSERT_TRUE(e.fit.has_value());
  for (std::size_t i = 0; i < e.direct.size(); ++i) {
    EXPECT_GT(e.direct[i], 0.0);
    EXPECT_TRUE(e.bounds[i].converged);
    EXPECT_GE(e.bounds[i].value, e.direct[i]);
  }
}

TEST(YoungCheck, TrivialCases) {
  const EnergyWindow I(0, 10);
  const auto F = ConvexGauge::power_law(1.0);
  const StepFunction xi({1.0, 3.0}, {0.0, 1.0, 0.0});
  const auto r = young_check(StepFunction(0.0), xi, F, 2.0, I);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_TRUE(r.holds());
  std::mt19937_64 rng(1);
  EXPECT_EQ(young_check(random_h(rng, I), StepFunction(0.0), F, 0.0, I).lhs, 0.0);
}

TEST(YoungCheck, HoldsForRandomTestFunctions) {
  const auto A = free_chain(16, 8);
  const EnergyWindow I(0, 60);
  const auto xi = spectral_shift(A, cut(A, {8}), EnergyWindow(-1e6, I.hi)).xi;
  const auto series = veff_singular_values(A, cut(A, {8}), 10000);
  const auto F = ConvexGauge::power_law(1.0);
  const double hs = hs_bound(series, F, I.hi).value;
  std::mt19937_64 rng(42);
  for (int t = 0; t < 100; ++t) {
    auto h = random_h(rng, I);
    if (t % 2) h = h.map([](double v) { return 40.0 * v; });
    EXPECT_TRUE(young_check(h, xi, F, hs, I).holds()) << t;
  }
}

TEST(Weyl, ContinuumSpectrumHasPositiveMargin) {
  const double L = 5.0;
  std::vector<double> e;
  for (int n = 1; n <= 200; ++n) e.push_back(std::pow(n * std::numbers::pi / L, 2));
  // E_n − (2π/e)(n/L)² = (π² − 2π/e)(n/L)², smallest at n = 1
  const double expect = (kPi2 - 2 * std::numbers::pi / std::numbers::e) / (L * L);
  EXPECT_NEAR(weyl_check(e, L, 0.0, 0.0, 1), expect, 1e-12);
  EXPECT_TRUE(std::isinf(weyl_check({}, L, 0.0, 0.0, 1)));
}

TEST(Weyl, FiniteDifferenceLowModes) {
  const auto A = free_chain(8, 8);
  const auto e = eigenvalues(discretize(A), 200.0);
  EXPECT_GT(weyl_check(e, 8.0, 0.0, 0.0, 1), 0.0);
}

TEST(SsfBoundConstant, MatchesGeometricSeries) {
  // d = 1, p = 1: e^T C2 Σ e^{−cn} = e^T C2 / (e^c − 1)
  const double C2 = 2.0, c = 0.4, T = 1.5;
  EXPECT_NEAR(ssf_bound_constant(C2, c, 1, 1.0, T), std::exp(T) * C2 / std::expm1(c), 1e-12);
  // p = 2: Σ 2n e^{−cn} = 2 e^c/(e^c − 1)², then the square root
  const double s2 = 2 * std::exp(c) / std::pow(std::expm1(c), 2);
  EXPECT_NEAR(ssf_bound_constant(C2, c, 1, 2.0, T), std::sqrt(std::exp(T) * C2 * s2), 1e-10);
  EXPECT_THROW(ssf_bound_constant(C2, 0.0, 1, 1.0, T), std::invalid_argument);
}
