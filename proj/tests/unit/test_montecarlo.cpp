#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "errors.hpp"
#include "montecarlo.hpp"
#include "random.hpp"

using namespace etpsim;

namespace {

constexpr double kPi = std::numbers::pi;

ExperimentPlan make_plan(Scan scan, double step = 7.5, int reps = 3, std::uint64_t seed = 9) {
  ExperimentPlan p;
  p.scan = scan;
  p.angles_deg = ExperimentPlan::grid_deg(0.0, 180.0, step);
  p.repetitions = reps;
  p.seed = seed;
  return p;
}

// Two-fold fringe of the (A+, B+) detector pair sampled over one HWP period.
std::pair<std::vector<double>, std::vector<double>> werner_fringe(double p, double mean,
                                                                  std::uint64_t seed) {
  const EopState e = EopState::singlet(p);
  std::vector<double> angles, counts;
  RandomStream rng(seed);
  const int n = 24;
  for (int k = 0; k < n; ++k) {
    const double a = k * (kPi / 2) / n;
    // Probabilities run from 0 to 1/2; scale so the average is `mean`.
    const double expected = 4.0 * mean * twofold_fringe(e, a, DetectorPair::a_plus_b_plus);
    angles.push_back(a);
    counts.push_back(static_cast<double>(sample_poisson(expected, rng)));
  }
  return {angles, counts};
}

}  // namespace

TEST(Grid, InclusiveEndpoints) {
  const auto g = ExperimentPlan::grid_deg(0.0, 180.0, 7.5);
  ASSERT_EQ(g.size(), 25u);
  EXPECT_DOUBLE_EQ(g.front(), 0.0);
  EXPECT_DOUBLE_EQ(g.back(), 180.0);
  EXPECT_EQ(ExperimentPlan::grid_deg(0.0, 180.0, 1.0).size(), 181u);
  EXPECT_EQ(ExperimentPlan::grid_deg(5.0, 5.0, 1.0).size(), 1u);
}

TEST(Grid, RejectsBadArguments) {
  EXPECT_THROW(ExperimentPlan::grid_deg(0.0, 180.0, 0.0), InputError);
  EXPECT_THROW(ExperimentPlan::grid_deg(10.0, 0.0, 1.0), InputError);
  EXPECT_THROW(ExperimentPlan::grid_deg(0.0, 1e9, 1e-3), InputError);
}

TEST(Plan, ValidateRejectsBadPlans) {
  ExperimentPlan p = make_plan(Scan::fig2a);
  p.repetitions = 0;
  EXPECT_THROW(p.validate(), InputError);
  p = make_plan(Scan::fig2a);
  p.window_s = 0.0;
  EXPECT_THROW(p.validate(), InputError);
  p = make_plan(Scan::fig2a);
  p.rate_scale = -1.0;
  EXPECT_THROW(p.validate(), InputError);
  p = make_plan(Scan::fig2a);
  p.angles_deg.clear();
  EXPECT_THROW(p.validate(), InputError);
}

TEST(RunScan, RecordLayoutIsRepetitionMajor) {
  const auto d = run_scan(MixtureModel(100.0, 0.37, 0.63, 0.0), make_plan(Scan::fig2b));
  ASSERT_EQ(d.records.size(), 75u);
  EXPECT_EQ(d.records[0].repetition, 0);
  EXPECT_EQ(d.records[24].grid_index, 24);
  EXPECT_EQ(d.records[25].repetition, 1);
  EXPECT_EQ(d.records[25].grid_index, 0);
  EXPECT_DOUBLE_EQ(d.records[26].angle_deg, 7.5);
}

TEST(RunScan, DeterministicForSamePlan) {
  const MixtureModel m(300.0, 0.5, 0.4, 0.1);
  const auto a = run_scan(m, make_plan(Scan::fig2c));
  const auto b = run_scan(m, make_plan(Scan::fig2c));
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].counts, b.records[i].counts);
}

TEST(RunScan, SeedChangesCounts) {
  const MixtureModel m(300.0, 0.5, 0.4, 0.1);
  const auto a = run_scan(m, make_plan(Scan::fig2c, 7.5, 1, 1));
  const auto b = run_scan(m, make_plan(Scan::fig2c, 7.5, 1, 2));
  int differ = 0;
  for (std::size_t i = 0; i < a.records.size(); ++i) differ += a.records[i].counts != b.records[i].counts;
  EXPECT_GT(differ, 10);
}

TEST(RunScan, EachPointUsesItsOwnStream) {
  const MixtureModel m(80.0, 0.37, 0.63, 0.0);
  const ExperimentPlan plan = make_plan(Scan::fig2a, 15.0, 4, 123);
  const auto d = run_scan(m, plan);
  for (const auto& rec : d.records) {
    RandomStream rng(point_seed(plan.seed, static_cast<std::uint64_t>(rec.repetition),
                                static_cast<std::uint64_t>(rec.grid_index)));
    EXPECT_EQ(rec.counts, sample_poisson(expected_counts(m, plan, rec.angle()), rng));
  }
}

TEST(RunScan, ZeroProbabilityPointsGiveZeroCounts) {
  const auto d = run_scan(MixtureModel::pure_etp(1e6), make_plan(Scan::fig2a, 7.5, 5));
  for (const auto& rec : d.records) {
    if (std::fmod(rec.angle_deg, 90.0) == 45.0) {
      EXPECT_EQ(rec.counts, 0u) << rec.angle_deg;
    }
  }
}

TEST(RunScan, MeanTracksExpectation) {
  const MixtureModel m(200.0, 0.37, 0.63, 0.0);
  ExperimentPlan plan = make_plan(Scan::fig2a, 45.0, 400);
  const auto d = run_scan(m, plan);
  std::vector<double> sum(plan.angles_deg.size(), 0.0);
  for (const auto& rec : d.records) sum[rec.grid_index] += static_cast<double>(rec.counts);
  for (std::size_t k = 0; k < sum.size(); ++k) {
    const double expected = expected_counts(m, plan, plan.angles_deg[k] * kPi / 180);
    EXPECT_NEAR(sum[k] / 400, expected, 5 * std::sqrt(expected / 400));
  }
}

TEST(RunScan, RateScaleAndWindowMultiplyMean) {
  const MixtureModel m(10.0, 1.0, 0.0, 0.0);
  ExperimentPlan plan = make_plan(Scan::fig2a);
  plan.window_s = 2.0;
  plan.rate_scale = 3.0;
  EXPECT_NEAR(expected_counts(m, plan, 0.0), 10.0 / 3.0 * 6.0, 1e-12);
}

TEST(RunScan, RejectsUnrepresentableMeans) {
  ExperimentPlan plan = make_plan(Scan::fig2a);
  plan.rate_scale = 1e300;
  EXPECT_THROW(run_scan(MixtureModel(1e10, 1.0, 0.0, 0.0), plan), InputError);
}

TEST(TwofoldFringe, PureSingletIsPerfectlyAnticorrelated) {
  const EopState e = EopState::singlet(0.0);
  EXPECT_NEAR(twofold_fringe(e, 0.0, DetectorPair::a_plus_b_plus), 0.0, 1e-15);
  EXPECT_NEAR(twofold_fringe(e, 0.0, DetectorPair::a_plus_b_minus), 0.5, 1e-15);
  EXPECT_NEAR(twofold_fringe(e, kPi / 4, DetectorPair::a_plus_b_plus), 0.5, 1e-15);
}

TEST(TwofoldFringe, PairProbabilitiesSumToOne) {
  for (double p : {0.0, 0.18, 1.0})
    for (double a : {0.0, 0.2, 0.9}) {
      double total = 0.0;
      for (auto pair : {DetectorPair::a_plus_b_plus, DetectorPair::a_plus_b_minus,
                        DetectorPair::a_minus_b_plus, DetectorPair::a_minus_b_minus}) {
        total += twofold_fringe(EopState::singlet(p), a, pair);
      }
      EXPECT_NEAR(total, 1.0, 1e-14);
    }
}

TEST(TwofoldFringe, WernerVisibilityIsOneMinusNoise) {
  for (double p : {0.0, 0.1, 0.18, 0.5, 1.0}) {
    const EopState e = EopState::singlet(p);
    const double hi = twofold_fringe(e, kPi / 4, DetectorPair::a_plus_b_plus);
    const double lo = twofold_fringe(e, 0.0, DetectorPair::a_plus_b_plus);
    EXPECT_NEAR((hi - lo) / (hi + lo), 1.0 - p, 1e-14);
  }
}

TEST(Visibility, PerfectSinusoidGivesOne) {
  std::vector<double> a, c;
  for (int k = 0; k < 12; ++k) {
    a.push_back(k * kPi / 24);
    c.push_back(100.0 * (1.0 + std::cos(4 * a.back())));
  }
  const auto v = visibility(a, c, 4.0);
  EXPECT_NEAR(v.visibility, 1.0, 1e-6);
  EXPECT_FALSE(v.degenerate);
}

TEST(Visibility, FlatCountsAreDegenerate) {
  std::vector<double> a, c;
  for (int k = 0; k < 8; ++k) {
    a.push_back(k * kPi / 16);
    c.push_back(50.0);
  }
  const auto v = visibility(a, c, 4.0);
  EXPECT_TRUE(v.degenerate);
  EXPECT_EQ(v.visibility, 0.0);
}

TEST(Visibility, RequiresFivePointsOverAPeriod) {
  EXPECT_THROW(visibility({0, 0.1, 0.2, 0.3}, {1, 2, 3, 4}, 4.0), InputError);
  EXPECT_THROW(visibility({0, 0.01, 0.02, 0.03, 0.04}, {1, 2, 3, 4, 5}, 4.0), InputError);
}

TEST(Visibility, PlantedNinetyPercentRecovered) {
  // V = 0.9 planted directly on the sinusoid, mean 3000 per point.
  RandomStream rng(31);
  std::vector<double> a, c;
  for (int k = 0; k < 24; ++k) {
    a.push_back(k * kPi / 48);
    c.push_back(static_cast<double>(sample_poisson(3000.0 * (1.0 + 0.9 * std::cos(4 * a.back())), rng)));
  }
  const auto v = visibility(a, c, 4.0);
  EXPECT_NEAR(v.visibility, 0.90, 0.02);
  EXPECT_GT(v.sigma, 0.0);
  EXPECT_LT(v.sigma, 0.01);
}

TEST(Visibility, WernerFringesFollowOneMinusNoise) {
  for (double p : {0.1, 0.18}) {
    const auto [a, c] = werner_fringe(p, 3000.0, 77);
    EXPECT_NEAR(visibility(a, c, 4.0).visibility, 1.0 - p, 0.01) << "p = " << p;
  }
}

TEST(Visibility, FullyMixedPairHasNoFringe) {
  const auto [a, c] = werner_fringe(1.0, 3000.0, 5);
  EXPECT_NEAR(visibility(a, c, 4.0).visibility, 0.0, 0.02);
}
