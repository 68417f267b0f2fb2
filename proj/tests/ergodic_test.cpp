#include <gtest/gtest.h>

#include <numbers>
#include <numeric>

#include "idslab/ergodic.hpp"
#include "idslab/ssf.hpp"

using namespace idslab;

namespace {

const std::vector<std::string> kAB{"a", "b"};
constexpr ColorId A{0}, B{1};

std::shared_ptr<const PrototypeLibrary> library() {
  auto lib = std::make_shared<PrototypeLibrary>();
  Prototype b;
  b.v = FieldSamples::constant(1.0);
  lib->add("a", Prototype{});
  lib->add("b", b);
  return lib;
}

BackendParams lattice() { return {Backend::lattice, 1, library(), 3000}; }
BackendParams continuum(int n) { return {Backend::continuum, n, library(), 3000}; }

Coloring ab_chain() { return Coloring::periodic(1, kAB, Site(2), {A, B}); }

FiniteSet sites(std::initializer_list<int> xs) {
  std::vector<Site> s;
  for (int x : xs) s.push_back(Site(x));
  return FiniteSet(1, s);
}

// ∫_I |f − g|^p by midpoint sampling, g an arbitrary function.
template <class G>
double sampled_distance(const StepFunction& f, G&& g, const EnergyWindow& I, int samples = 400000) {
  const double h = I.length() / samples;
  double s = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double x = I.lo + (k + 0.5) * h;
    s += std::pow(std::abs(f(x) - g(x)), I.p) * h;
  }
  return std::pow(s, 1.0 / I.p);
}

}  // namespace

TEST(CountingField, EqualPatternsGiveEqualFunctions) {
  const auto F = counting_field(ab_chain(), lattice(), EnergyWindow(0, 4.5));
  EXPECT_EQ(F(cube(6, 1)), F(cube(6, 1).translated(Site(4))));
  const auto G = counting_field(ab_chain(), continuum(4), EnergyWindow(0, 40));
  EXPECT_EQ(G(cube(3, 1)), G(cube(3, 1).translated(Site(-6))));
}

TEST(CountingField, MatchesLatticeModelDirectly) {
  const EnergyWindow I(0, 4.5);
  const auto F = counting_field(ab_chain(), lattice(), I);
  const FiniteSet Q = cube(9, 1).translated(Site(3));
  const auto e = eigenvalues(lattice_model(ab_chain(), Q, *library()), I.hi);
  EXPECT_EQ(F(Q), counting_function(e, I));
}

TEST(CountingField, MissingPrototypeAndCap) {
  auto lib = std::make_shared<PrototypeLibrary>();
  lib->add("a", Prototype{});
  EXPECT_THROW(counting_field(ab_chain(), {Backend::lattice, 1, lib, 3000}, EnergyWindow(0, 1)), std::invalid_argument);
  const auto F = counting_field(ab_chain(), {Backend::continuum, 8, library(), 50}, EnergyWindow(0, 1));
  EXPECT_NO_THROW(F(cube(6, 1)));
  EXPECT_THROW(F(cube(7, 1)), std::length_error);
}

TEST(CountingField, SingleCellNormBoundedByFittedK) {
  const EnergyWindow I(0, 4.5);
  const auto F = counting_field(ab_chain(), lattice(), I);
  const auto fit = fit_uniform_bound(F, 0.0);
  // single sites: eigenvalue 2 (symbol a) and 3 (symbol b)
  EXPECT_NEAR(fit.K, std::sqrt(2.5), 1e-14);
  EXPECT_NEAR(fit.C3, std::sqrt(2.5) / std::sqrt(4.5), 1e-14);
  for (int x : {0, 1}) EXPECT_LE(lp_norm(F(sites({x})), I), fit.K + 1e-15);
}

TEST(Additivity, TwoSitesOnTheLattice) {
  const EnergyWindow I(0, 4, 2);
  const auto F = counting_field(Coloring::constant(1, kAB, A), lattice(), I, 1.0);
  const std::vector<FiniteSet> parts{sites({0}), sites({1})};
  // {1,3} against {2,2}: difference 1 on [1,2), −1 on [2,3)
  const auto r = additivity_defect(F, parts);
  EXPECT_NEAR(r.defect, std::sqrt(2.0), 1e-14);
  EXPECT_DOUBLE_EQ(r.budget, 2.0);
  EXPECT_TRUE(r.within_budget());
}

TEST(Additivity, SeparatedSetsAreExactlyAdditive) {
  const auto F = counting_field(ab_chain(), lattice(), EnergyWindow(0, 4.5));
  const std::vector<FiniteSet> parts{sites({0, 1}), sites({5, 6, 7}), sites({12})};
  EXPECT_EQ(additivity_defect(F, parts).defect, 0.0);
  const auto G = counting_field(ab_chain(), continuum(4), EnergyWindow(0, 60));
  // equal spectra up to eigensolver rounding, so breakpoints may split by ~1e-14
  EXPECT_LT(additivity_defect(G, parts).defect, 1e-6);
}

TEST(Additivity, TrivialPartitionAndOverlap) {
  const auto F = counting_field(ab_chain(), lattice(), EnergyWindow(0, 4.5));
  const std::vector<FiniteSet> one{cube(5, 1)};
  EXPECT_EQ(additivity_defect(F, one).defect, 0.0);
  const std::vector<FiniteSet> overlap{sites({0, 1}), sites({1, 2})};
  EXPECT_THROW(additivity_defect(F, overlap), std::invalid_argument);
}

TEST(Additivity, ContinuumSplitEqualsOneFacetShift) {
  const EnergyWindow I(0, 60, 2);
  const auto params = continuum(8);
  const auto F = counting_field(ab_chain(), params, I, 1.0);
  const std::vector<FiniteSet> parts{sites({0, 1}), sites({2, 3})};
  const auto r = additivity_defect(F, parts);
  const OperatorSpec whole{cube(4, 1), 8, ab_chain(), Backend::continuum, params.prototypes, {}};
  const auto xi = spectral_shift(whole, add_facet_dirichlet(whole, Facet{Site(2), 0}), I).xi;
  EXPECT_GT(r.defect, 0.0);
  EXPECT_NEAR(r.defect, lp_norm(xi, I), 1e-12);
}

TEST(DirectRoute, FreeChainApproachesBandIds) {
  const EnergyWindow I(0, 4.5, 2);
  const auto F = counting_field(Coloring::constant(1, kAB, A), lattice(), I);
  std::vector<FiniteSet> seq;
  for (int j = 8; j <= 256; j *= 2) seq.push_back(cube(j, 1));
  const auto r = direct_route(F, seq);
  ASSERT_EQ(r.cauchy.size(), seq.size() - 1);
  for (std::size_t k = 1; k < r.cauchy.size(); ++k) EXPECT_LE(r.cauchy[k], 1.5 * r.cauchy[k - 1]);
  auto band = [](double l) { return std::acos(1.0 - std::clamp(l, 0.0, 4.0) / 2.0) / std::numbers::pi; };
  std::vector<double> dist;
  for (const auto& f : r.normalized) dist.push_back(sampled_distance(f, band, I));
  EXPECT_LT(dist.back(), 0.02);
  EXPECT_LT(dist.back(), dist.front());
}

TEST(DirectRoute, SingleElementAndBadSequence) {
  const auto F = counting_field(ab_chain(), lattice(), EnergyWindow(0, 4.5));
  const std::vector<FiniteSet> one{cube(4, 1)};
  const auto r = direct_route(F, one);
  EXPECT_EQ(r.normalized.size(), 1u);
  EXPECT_TRUE(r.cauchy.empty());
  const std::vector<FiniteSet> flat(4, cube(4, 1));
  EXPECT_THROW(direct_route(F, flat), std::invalid_argument);
}

TEST(PatternRoute, ConstantColoringIsOneCube) {
  const EnergyWindow I(0, 4.5);
  const auto C = Coloring::constant(2, kAB, B);
  const auto F = counting_field(C, lattice(), I);
  for (int M : {1, 2, 3}) {
    const auto route = pattern_route(F, exact_frequency_table(C, M));
    EXPECT_EQ(route, scale(F(cube(M, 2)), 1.0 / (M * M)));
  }
}

TEST(PatternRoute, PeriodTwoWindowsOfSideTwo) {
  const EnergyWindow I(0, 4.5);
  const auto F = counting_field(ab_chain(), lattice(), I);
  const auto table = exact_frequency_table(ab_chain(), 2);
  ASSERT_EQ(table.entries.size(), 2u);
  // both window classes are [[2,−1],[−1,3]] up to relabeling: 2.5 ± √1.25
  const double lo = 2.5 - std::sqrt(1.25), hi = 2.5 + std::sqrt(1.25);
  const auto route = pattern_route(F, table);
  auto expect = [&](double l) { return ((l >= lo) + (l >= hi)) / 2.0; };
  for (double l = 0.0; l <= 4.5; l += 0.01) EXPECT_DOUBLE_EQ(route(l), expect(l)) << l;
}

TEST(PatternRoute, ZeroFrequencyIsNeverEvaluated) {
  const EnergyWindow I(0, 4.5);
  const auto base = counting_field(ab_chain(), lattice(), I);
  const Pattern aa(cube(2, 1), {A, A});
  AlmostAdditiveField F(ab_chain(), [&](const Pattern& P) {
    if (P == aa) throw std::logic_error("evaluated a pattern of frequency zero");
    return base.evaluate_pattern(P);
  }, I, {}, 0.0);
  auto table = exact_frequency_table(ab_chain(), 2);
  table.entries[aa] = Rational(0, 1);
  EXPECT_EQ(pattern_route(F, table), pattern_route(base, exact_frequency_table(ab_chain(), 2)));
}

TEST(PatternRoute, CacheAndThreadsDoNotChangeResult) {
  const EnergyWindow I(0, 4.5);
  const auto C = Coloring::periodic(2, kAB, Site(2, 3), {A, B, B, B, A, A});
  const auto F = counting_field(C, lattice(), I);
  const auto table = exact_frequency_table(C, 3);
  PatternCache cache;
  const auto plain = pattern_route(F, table);
  const auto cached = pattern_route(F, table, &cache, nullptr, Scheduler{4});
  EXPECT_EQ(plain, cached);
  EXPECT_GT(cache.size(), 0u);
  EXPECT_EQ(pattern_route(F, table, &cache), plain);
}

TEST(PatternRoute, MissingFrequencyForOccurringPattern) {
  const auto F = counting_field(ab_chain(), lattice(), EnergyWindow(0, 4.5));
  auto table = exact_frequency_table(ab_chain(), 2);
  table.entries.erase(table.entries.begin());
  const auto tally = enumerate_window_patterns(ab_chain(), cube(8, 1), 2);
  EXPECT_THROW(pattern_route(F, table, nullptr, &tally), std::invalid_argument);
}

TEST(ErrorBound, WorkedExample) {
  const IdsBoundConstants k{1.0, 1.0, 1.0, 1.0, 1};
  const double expect = 0.1 + (std::sqrt(2.0) + 1.0) * 0.1 + std::sqrt(2.0) * 0.05;
  EXPECT_NEAR(error_bound(10, 0.1, 0.05, k), expect, 1e-15);
  EXPECT_NEAR(error_bound(10, 0.1, 0.05, k), 0.4121, 5e-5);
}

TEST(ErrorBound, OnlyWindowTermSurvives) {
  const IdsBoundConstants k{2.5, 1.0, 3.0, 2.0, 2};
  for (int M : {1, 7, 100000}) EXPECT_EQ(error_bound(M, 0.0, 0.0, k), 2.5 / M);
  EXPECT_LT(error_bound(100000000, 0.0, 0.0, k), 1e-7);
  EXPECT_THROW(error_bound(0, 0.0, 0.0, k), std::invalid_argument);
  EXPECT_THROW(error_bound(1, -0.1, 0.0, k), std::invalid_argument);
}

TEST(ErrorBound, AlmostAdditiveForm) {
  const ErgodicBoundConstants k{2.0, 3.0, 8.0, 2};
  EXPECT_DOUBLE_EQ(error_bound(2, 0.5, 0.25, k), 2.0 * 8.0 / 4.0 + 5.0 * 0.5 + 2.0 * 0.25);
}

TEST(CompareRoutes, TableShapeAndDistances) {
  const EnergyWindow I(0, 4.5);
  auto F = counting_field(ab_chain(), lattice(), I);
  const auto fit = fit_uniform_bound(F, 0.0);
  F = F.with_constants(BoundaryTerm{1, 2.0}, fit.K);
  const std::vector<int> js{8, 16, 32}, Ms{1, 2, 4};
  const auto rep = compare_routes(F, js, Ms, Scheduler{2});
  ASSERT_EQ(rep.comparisons.size(), 9u);
  EXPECT_EQ(rep.D, 2.0);
  for (const auto& c : rep.comparisons) {
    const auto a = static_cast<std::size_t>(std::find(js.begin(), js.end(), c.j) - js.begin());
    const auto b = static_cast<std::size_t>(std::find(Ms.begin(), Ms.end(), c.M) - Ms.begin());
    EXPECT_EQ(c.distance, lp_distance(rep.direct[a], rep.pattern[b], I));
    EXPECT_GE(c.bound, c.distance);
  }
  EXPECT_THROW(compare_routes(F, js, {}), std::invalid_argument);
}

TEST(Parallel, KeepsOrderAndPropagatesErrors) {
  const auto sq = parallel_map(100, Scheduler{4, 10}, [](std::size_t i) { return i * i; },
                               [](std::size_t i) { return i % 7; });
  for (std::size_t i = 0; i < sq.size(); ++i) EXPECT_EQ(sq[i], i * i);
  EXPECT_THROW(parallel_map(10, Scheduler{3}, [](std::size_t i) -> int {
                 if (i == 6) throw std::runtime_error("boom");
                 return 0;
               }),
               std::runtime_error);
}

TEST(Parallel, PairwiseSum) {
  std::vector<double> x(1000);
  std::iota(x.begin(), x.end(), 1.0);
  EXPECT_EQ(pairwise_sum(x.data(), x.size()), 500500.0);
  EXPECT_EQ(pairwise_sum(x.data(), 0), 0.0);
}
