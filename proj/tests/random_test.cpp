#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "idslab/ergodic.hpp"
#include "idslab/random.hpp"

using namespace idslab;

namespace {

const std::vector<std::string> kAB{"a", "b"};

std::shared_ptr<const PrototypeLibrary> library() {
  auto lib = std::make_shared<PrototypeLibrary>();
  Prototype b;
  b.v = FieldSamples::constant(1.0);
  lib->add("a", Prototype{});
  lib->add("b", b);
  return lib;
}

BackendParams lattice() { return {Backend::lattice, 1, library(), 3000}; }

SiteDistribution bernoulli(std::uint64_t seed, int d = 1) { return {kAB, {0.5, 0.5}, seed, d}; }

double band_ids(double l) { return std::acos(1.0 - std::clamp(l, 0.0, 4.0) / 2.0) / std::numbers::pi; }

}  // namespace

TEST(SiteDistribution, Validation) {
  EXPECT_NO_THROW(bernoulli(1).validate());
  EXPECT_THROW((SiteDistribution{kAB, {0.5, 0.6}, 1, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((SiteDistribution{kAB, {1.0}, 1, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((SiteDistribution{kAB, {1.5, -0.5}, 1, 1}.validate()), std::invalid_argument);
  EXPECT_EQ((SiteDistribution{kAB, {0.0, 1.0}, 1, 1}.point_mass()), 1);
  EXPECT_EQ(bernoulli(1).point_mass(), -1);
}

TEST(SampleColoring, PointMassIsConstant) {
  const auto C = sample_coloring({kAB, {1.0, 0.0}, 7, 2}, 3);
  for (int x = -5; x < 5; ++x)
    for (int y = -5; y < 5; ++y) EXPECT_EQ(C(Site(x, y)), ColorId{0});
}

TEST(SampleColoring, DeterministicPerSeedAndIndex) {
  const auto a = sample_coloring(bernoulli(9), 4), b = sample_coloring(bernoulli(9), 4);
  const auto c = sample_coloring(bernoulli(9), 5);
  EXPECT_EQ(restrict(a, cube(200, 1)), restrict(b, cube(200, 1)));
  EXPECT_NE(restrict(a, cube(200, 1)), restrict(c, cube(200, 1)));
}

TEST(SampleColoring, SymbolFrequencyWithinThreeStandardErrors) {
  const auto dist = bernoulli(2024);
  const int samples = 10000, L = 10;
  long hits = 0;
  long pairs = 0;
  for (int s = 0; s < samples; ++s) {
    const auto C = sample_coloring(dist, static_cast<std::uint64_t>(s));
    for (int x = 0; x < L; ++x) hits += C(Site(x)) == ColorId{0};
    pairs += C(Site(0)) == ColorId{0} && C(Site(1)) == ColorId{1};
  }
  const double n = static_cast<double>(samples) * L;
  EXPECT_LE(std::abs(hits / n - 0.5), 3.0 * std::sqrt(0.25 / n));
  // "ab" on {0,1} has probability 1/4
  EXPECT_LE(std::abs(pairs / double(samples) - 0.25), 3.0 * std::sqrt(0.25 * 0.75 / samples));
}

TEST(CenteredBox, ContainsOriginInTheMiddle) {
  const auto Q = centered_box(3, 2);
  EXPECT_EQ(Q.size(), 49u);
  EXPECT_TRUE(Q.contains(Site(-3, 3)));
  EXPECT_FALSE(Q.contains(Site(4, 0)));
  EXPECT_THROW(centered_box(0, 1), std::invalid_argument);
}

TEST(LocalizedSpectrum, WeightsSumToOwnedPoints) {
  const auto C = sample_coloring(bernoulli(3), 0);
  const auto s = localized_spectrum(C, lattice(), 5);
  double sum = 0.0;
  for (double w : s.weights) sum += w;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_NEAR(localized_heat_trace(s, 0.0), 1.0, 1e-12);
  const BackendParams cont{Backend::continuum, 4, library(), 3000};
  const auto sc = localized_spectrum(C, cont, 3);
  sum = 0.0;
  for (double w : sc.weights) sum += w;
  EXPECT_NEAR(sum, 4.0, 1e-12);
}

TEST(PasturShubin, PointMassMatchesBandIds) {
  const SiteDistribution dist{kAB, {1.0, 0.0}, 1, 1};
  const auto grid = uniform_grid(-1.0, 4.5, 56);
  const auto est = pastur_shubin_mc(dist, lattice(), grid, 3, 64);
  const auto single = localized_trace(localized_spectrum(Coloring::constant(1, kAB, ColorId{0}), lattice(), 64), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(est.mean[i], single[i], 1e-15);
    EXPECT_NEAR(est.stderr_[i], 0.0, 1e-15);
    EXPECT_LE(std::abs(est.mean[i] - band_ids(grid[i])), 0.02) << grid[i];
  }
  EXPECT_EQ(est.mean.front(), 0.0);
}

TEST(PasturShubin, MeanIsMonotoneAndBounded) {
  const auto grid = uniform_grid(-0.5, 6.0, 40);
  const auto est = pastur_shubin_mc(bernoulli(5), lattice(), grid, 40, 16);
  EXPECT_EQ(est.mean.front(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_GE(est.mean[i], est.mean[i - 1] - 1e-15);
  EXPECT_NEAR(est.mean.back(), 1.0, 1e-12);
}

TEST(PasturShubin, DisjointSeedSetsAgree) {
  const auto grid = uniform_grid(0.0, 5.0, 21);
  const auto a = pastur_shubin_mc(bernoulli(11), lattice(), grid, 200, 32);
  const auto b = pastur_shubin_mc(bernoulli(22), lattice(), grid, 200, 32);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double se = std::hypot(a.stderr_[i], b.stderr_[i]);
    EXPECT_LE(std::abs(a.mean[i] - b.mean[i]), 3.0 * se + 1e-12) << grid[i];
  }
}

TEST(PasturShubin, ThreadCountDoesNotChangeResult) {
  const auto grid = uniform_grid(0.0, 5.0, 11);
  const auto a = pastur_shubin_mc(bernoulli(4), lattice(), grid, 30, 8, 0, Scheduler{1});
  const auto b = pastur_shubin_mc(bernoulli(4), lattice(), grid, 30, 8, 0, Scheduler{3});
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stderr_, b.stderr_);
  std::ostringstream os;
  a.write_csv(os);
  EXPECT_NE(os.str().find("lambda,mean,stderr,S,R"), std::string::npos);
  EXPECT_EQ(a.to_step_function()(grid[3] + 1e-9), a.mean[3]);
}

TEST(CompareRandom, PointMassReducesToDeterministicRoute) {
  const EnergyWindow I(0.0, 4.5);
  const SiteDistribution dist{kAB, {0.0, 1.0}, 1, 1};
  const std::vector<int> js{16, 32, 64};
  const StepFunction ref({1.0, 3.0}, {0.0, 0.5, 1.0});
  const auto rep = compare_random_ids(dist, lattice(), js, I, {0, 1}, ref);
  const auto F = counting_field(Coloring::constant(1, kAB, ColorId{1}), lattice(), I);
  for (std::size_t j = 0; j < js.size(); ++j) {
    const auto direct = scale(F(cube(js[j], 1)), 1.0 / js[j]);
    EXPECT_EQ(rep.distance[0][j], lp_distance(direct, ref, I));
    EXPECT_EQ(rep.distance[1][j], rep.distance[0][j]);
    EXPECT_EQ(rep.pair_spread[j], 0.0);
  }
}

TEST(CompareRandom, DistanceDecreasesPerSample) {
  const EnergyWindow I(0.0, 5.0);
  const auto dist = bernoulli(7);
  const auto est = pastur_shubin_mc(dist, lattice(), uniform_grid(0.0, 5.0, 101), 100, 24);
  const auto rep = compare_random_ids(dist, lattice(), {32, 256}, I, {1000, 1001, 1002}, est.to_step_function());
  for (std::size_t w = 0; w < rep.omegas.size(); ++w) EXPECT_TRUE(rep.decreases(w)) << w;
  EXPECT_LT(rep.pair_spread.back(), rep.pair_spread.front());
}
