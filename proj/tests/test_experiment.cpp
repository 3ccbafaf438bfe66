#include "underlay/experiment.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "underlay/analytic.hpp"

namespace underlay {
namespace {

Scenario dense_reference_scenario() {
  Scenario sc;
  sc.channel = {4.0, 1e-3, 1.0};
  sc.primary = {0.2, 1.0, 1.0, 1.0};
  sc.secondary = {0.2, 1.0, 1.0, 1.0};
  sc.weights = {1.0, 1.0, 1.0, 1.0};
  sc.qos = {1.0, 0.5};
  sc.bounds = {0.0, 5.0};
  return sc;
}

StrategyRow fixed_strategy(std::size_t index, double distance, double power,
                           double access) {
  StrategyRow row;
  row.pair_index = index;
  row.distance = distance;
  row.strategy = {power, access};
  row.objective = 0.0;
  row.feasible = true;
  return row;
}

double binomial_sigma(double p, std::int64_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

TEST(Deploy, DeterministicAndShapedByCounts) {
  const Scenario sc = dense_reference_scenario();
  const SimWindow window = SimWindow::square(3.0);
  const PairCounts counts{4, 6};
  const Deployment a = deploy(sc, window, counts, RngSpec{5, 0});
  const Deployment b = deploy(sc, window, counts, RngSpec{5, 0});

  ASSERT_EQ(a.primary.size(), 4u);
  ASSERT_EQ(a.secondary.size(), 6u);
  ASSERT_EQ(b.primary.size(), 4u);
  for (std::size_t i = 0; i < a.primary.size(); ++i) {
    EXPECT_EQ(a.primary[i].transmitter.x, b.primary[i].transmitter.x);
    EXPECT_EQ(a.primary[i].receiver.y, b.primary[i].receiver.y);
    EXPECT_EQ(a.primary[i].distance, b.primary[i].distance);
  }

  const Deployment c = deploy(sc, window, counts, RngSpec{5, 1});
  EXPECT_NE(a.primary[0].transmitter.x, c.primary[0].transmitter.x);
}

TEST(Deploy, ReceiversStayWithinPairingRange) {
  Scenario sc = dense_reference_scenario();
  sc.qos.pairing_range = 0.7;
  const Deployment dep =
      deploy(sc, SimWindow::square(4.0), PairCounts{20, 20}, RngSpec{9, 0});
  auto check = [&](const std::vector<PairPlacement>& pairs) {
    for (const PairPlacement& p : pairs) {
      const double d =
          std::hypot(p.receiver.x - p.transmitter.x,
                     p.receiver.y - p.transmitter.y);
      EXPECT_NEAR(d, p.distance, 1e-12);
      EXPECT_LE(p.distance, 0.7);
      EXPECT_LE(std::abs(p.transmitter.x), 4.0);
      EXPECT_LE(std::abs(p.transmitter.y), 4.0);
    }
  };
  check(dep.primary);
  check(dep.secondary);
}

TEST(Deploy, PoissonCountsTrackTheDensities) {
  const Scenario sc = dense_reference_scenario();
  const SimWindow window = SimWindow::square(2.0);  // area 16
  const int draws = 300;
  double primary_total = 0.0;
  double secondary_total = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Deployment dep = deploy(sc, window, std::nullopt,
                                  RngSpec{42, static_cast<std::uint64_t>(i)});
    primary_total += static_cast<double>(dep.primary.size());
    secondary_total += static_cast<double>(dep.secondary.size());
  }
  const double expected = sc.primary.density * window.area();
  const double sigma = std::sqrt(expected / draws);
  EXPECT_NEAR(primary_total / draws, expected, 4.0 * sigma);
  EXPECT_NEAR(secondary_total / draws, expected, 4.0 * sigma);

  EXPECT_THROW(
      deploy(sc, window, PairCounts{-1, 0}, RngSpec{}),
      std::invalid_argument);
}

TEST(OptimizeAll, PlansEveryPairLikeTheSolver) {
  const Scenario sc = dense_reference_scenario();
  const Deployment dep =
      deploy(sc, SimWindow::square(3.0), PairCounts{3, 5}, RngSpec{7, 0});
  const std::vector<StrategyRow> rows = optimize_all(dep, sc);
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].pair_index, i);
    EXPECT_EQ(rows[i].distance, dep.secondary[i].distance);
    EXPECT_TRUE(rows[i].feasible);
    const OptimalStrategy direct = solve(rows[i].distance, sc);
    EXPECT_EQ(rows[i].strategy.power, direct.strategy.power);
    EXPECT_EQ(rows[i].strategy.access_prob, direct.strategy.access_prob);
    EXPECT_EQ(rows[i].objective, direct.objective);
  }
}

TEST(OptimizeAll, InfeasiblePairsFallBackToSilence) {
  Scenario sc = dense_reference_scenario();
  sc.qos.min_connection_prob = 0.9;
  const Deployment dep =
      deploy(sc, SimWindow::square(3.0), PairCounts{2, 4}, RngSpec{7, 0});
  const std::vector<StrategyRow> rows = optimize_all(dep, sc);
  ASSERT_EQ(rows.size(), 4u);
  for (const StrategyRow& row : rows) {
    EXPECT_FALSE(row.feasible);
    EXPECT_EQ(row.strategy.power, sc.bounds.lo);
    EXPECT_EQ(row.strategy.access_prob, 0.0);
    EXPECT_EQ(row.objective, 0.0);
  }

  // Silent fallbacks still simulate cleanly: attempts stay at zero.
  const BlockTally tally = run_resource_blocks(
      dep, rows, sc, 200, CrossTier::on, RngSpec{1, 0});
  for (const PairTally& t : tally.secondary) {
    EXPECT_EQ(t.attempts, 0);
    EXPECT_EQ(t.success_rate, 0.0);
    EXPECT_EQ(t.raw_rate, 0.0);
  }
  for (const PairTally& t : tally.primary) {
    EXPECT_EQ(t.attempts, 200);
  }
}

TEST(RunResourceBlocks, DeterministicAcrossRunsAndThreads) {
  const Scenario sc = dense_reference_scenario();
  const Deployment dep =
      deploy(sc, SimWindow::square(3.0), PairCounts{4, 4}, RngSpec{11, 0});
  const std::vector<StrategyRow> rows = optimize_all(dep, sc);

  const SuccessStats a = compare_cross_tier(dep, rows, sc, 1500, RngSpec{2, 0}, 1);
  const SuccessStats b = compare_cross_tier(dep, rows, sc, 1500, RngSpec{2, 0}, 4);
  for (std::size_t i = 0; i < a.with_cross_tier.secondary.size(); ++i) {
    EXPECT_EQ(a.with_cross_tier.secondary[i].attempts,
              b.with_cross_tier.secondary[i].attempts);
    EXPECT_EQ(a.with_cross_tier.secondary[i].successes,
              b.with_cross_tier.secondary[i].successes);
    EXPECT_EQ(a.without_cross_tier.secondary[i].successes,
              b.without_cross_tier.secondary[i].successes);
  }
  for (std::size_t i = 0; i < a.with_cross_tier.primary.size(); ++i) {
    EXPECT_EQ(a.with_cross_tier.primary[i].successes,
              b.with_cross_tier.primary[i].successes);
  }
}

TEST(RunResourceBlocks, CrossTierOffNeverHurtsAnyPair) {
  const Scenario sc = dense_reference_scenario();
  const Deployment dep =
      deploy(sc, SimWindow::square(3.0), PairCounts{6, 6}, RngSpec{13, 0});
  const std::vector<StrategyRow> rows = optimize_all(dep, sc);
  const SuccessStats stats =
      compare_cross_tier(dep, rows, sc, 2000, RngSpec{3, 0});

  auto check = [](const std::vector<PairTally>& on,
                  const std::vector<PairTally>& off) {
    ASSERT_EQ(on.size(), off.size());
    for (std::size_t i = 0; i < on.size(); ++i) {
      EXPECT_EQ(on[i].attempts, off[i].attempts);
      EXPECT_GE(off[i].successes, on[i].successes);
    }
  };
  check(stats.with_cross_tier.primary, stats.without_cross_tier.primary);
  check(stats.with_cross_tier.secondary, stats.without_cross_tier.secondary);
}

TEST(RunResourceBlocks, AttemptsFollowTheAccessProbability) {
  const Scenario sc = dense_reference_scenario();
  Deployment dep;
  dep.window = SimWindow::square(3.0);
  dep.primary.push_back({{0.0, 0.0}, {0.4, 0.0}, 0.4});
  dep.secondary.push_back({{1.5, 1.5}, {1.5, 1.2}, 0.3});

  const std::int64_t blocks = 10000;
  const double access = 0.35;
  std::vector<StrategyRow> rows{fixed_strategy(0, 0.3, 1.0, access)};
  const BlockTally tally = run_resource_blocks(
      dep, rows, sc, blocks, CrossTier::on, RngSpec{17, 0});

  EXPECT_EQ(tally.primary[0].attempts, blocks);
  const double expected = access * static_cast<double>(blocks);
  EXPECT_NEAR(static_cast<double>(tally.secondary[0].attempts), expected,
              4.0 * std::sqrt(expected * (1.0 - access)));
  EXPECT_DOUBLE_EQ(tally.secondary[0].raw_rate,
                   static_cast<double>(tally.secondary[0].successes) /
                       expected);
}

TEST(RunResourceBlocks, LoneLinkMatchesNoiseOnlyProbability) {
  Scenario sc = dense_reference_scenario();
  sc.channel.noise = 0.8;
  sc.primary.power = 2.0;
  Deployment dep;
  dep.window = SimWindow::square(3.0);
  dep.primary.push_back({{0.0, 0.0}, {0.5, 0.0}, 0.5});

  const std::int64_t blocks = 20000;
  const SuccessStats stats =
      compare_cross_tier(dep, {}, sc, blocks, RngSpec{23, 0});
  const double s = laplace_argument(1.0, 0.5, sc.channel);
  const double exact = std::exp(-s * 0.8 / 2.0);
  EXPECT_NEAR(stats.with_cross_tier.primary[0].success_rate, exact,
              4.0 * binomial_sigma(exact, blocks));
  EXPECT_EQ(stats.with_cross_tier.primary[0].successes,
            stats.without_cross_tier.primary[0].successes);
}

TEST(RunResourceBlocks, TwoPairsMatchRayleighClosedForm) {
  Scenario sc = dense_reference_scenario();
  sc.channel.noise = 0.5;
  sc.primary.power = 2.0;
  Deployment dep;
  dep.window = SimWindow::square(3.0);
  dep.primary.push_back({{0.0, 0.0}, {0.4, 0.0}, 0.4});
  dep.secondary.push_back({{1.0, 0.5}, {1.0, 0.2}, 0.3});

  const double sec_power = 1.5;
  std::vector<StrategyRow> rows{fixed_strategy(0, 0.3, sec_power, 1.0)};
  const std::int64_t blocks = 40000;
  const SuccessStats stats =
      compare_cross_tier(dep, rows, sc, blocks, RngSpec{29, 0});

  // Primary link with one Rayleigh interferer: the fading ratio gives a
  // 1 / (1 + s * gamma * power_ratio * gain) factor on top of the noise term.
  const double s_a = laplace_argument(1.0, 0.4, sc.channel);
  const double noise_a = std::exp(-s_a * sc.channel.noise / 2.0);
  const double d_cross_a = std::hypot(1.0 - 0.4, 0.5 - 0.0);
  const double exact_on =
      noise_a / (1.0 + s_a * (sec_power / 2.0) *
                           path_loss(d_cross_a, sc.channel));
  EXPECT_NEAR(stats.with_cross_tier.primary[0].success_rate, exact_on,
              4.0 * binomial_sigma(exact_on, blocks));
  EXPECT_NEAR(stats.without_cross_tier.primary[0].success_rate, noise_a,
              4.0 * binomial_sigma(noise_a, blocks));

  const double s_b = laplace_argument(1.0, 0.3, sc.channel);
  const double noise_b = std::exp(-s_b * sc.channel.noise / sec_power);
  const double d_cross_b = std::hypot(1.0 - 0.0, 0.2 - 0.0);
  const double exact_b =
      noise_b / (1.0 + s_b * (2.0 / sec_power) *
                           path_loss(d_cross_b, sc.channel));
  EXPECT_NEAR(stats.with_cross_tier.secondary[0].success_rate, exact_b,
              4.0 * binomial_sigma(exact_b, blocks));
}

TEST(RunResourceBlocks, AdjacentInterfererCollapsesThePrimaryLink) {
  const Scenario sc = dense_reference_scenario();
  Deployment dep;
  dep.window = SimWindow::square(3.0);
  dep.primary.push_back({{0.0, 0.0}, {0.3, 0.0}, 0.3});
  // Secondary transmitter a hair from the primary receiver.
  dep.secondary.push_back({{0.301, 0.0}, {0.301, 0.2}, 0.2});

  std::vector<StrategyRow> rows{fixed_strategy(0, 0.2, 1.5, 1.0)};
  const SuccessStats stats =
      compare_cross_tier(dep, rows, sc, 4000, RngSpec{31, 0});
  const double on = stats.with_cross_tier.primary[0].success_rate;
  const double off = stats.without_cross_tier.primary[0].success_rate;
  EXPECT_GT(off, on + 0.3);
}

TEST(RunResourceBlocks, ZeroCrossWeightsMakeModesIdentical) {
  Scenario sc = dense_reference_scenario();
  sc.weights.ab = 0.0;
  sc.weights.ba = 0.0;
  const Deployment dep =
      deploy(sc, SimWindow::square(3.0), PairCounts{4, 4}, RngSpec{37, 0});
  const std::vector<StrategyRow> rows = optimize_all(dep, sc);
  const SuccessStats stats =
      compare_cross_tier(dep, rows, sc, 1000, RngSpec{5, 0});
  for (std::size_t i = 0; i < stats.with_cross_tier.primary.size(); ++i) {
    EXPECT_EQ(stats.with_cross_tier.primary[i].successes,
              stats.without_cross_tier.primary[i].successes);
  }
  for (std::size_t i = 0; i < stats.with_cross_tier.secondary.size(); ++i) {
    EXPECT_EQ(stats.with_cross_tier.secondary[i].successes,
              stats.without_cross_tier.secondary[i].successes);
  }
}

TEST(RunResourceBlocks, RejectsBadArguments) {
  const Scenario sc = dense_reference_scenario();
  const Deployment dep =
      deploy(sc, SimWindow::square(3.0), PairCounts{1, 2}, RngSpec{});
  std::vector<StrategyRow> rows{fixed_strategy(0, 0.2, 1.0, 1.0)};
  EXPECT_THROW(run_resource_blocks(dep, rows, sc, 10, CrossTier::on,
                                   RngSpec{}),
               std::invalid_argument);
  rows.push_back(fixed_strategy(1, 0.2, 1.0, 1.0));
  EXPECT_THROW(run_resource_blocks(dep, rows, sc, 0, CrossTier::on,
                                   RngSpec{}),
               std::invalid_argument);
}

TEST(Summarize, AggregatesHandBuiltTallies) {
  SuccessStats stats;
  stats.with_cross_tier.blocks = 100;
  stats.without_cross_tier.blocks = 100;

  PairTally t;
  t.attempts = 100;
  t.successes = 90;
  t.success_rate = 0.9;
  stats.with_cross_tier.primary.push_back(t);
  t.successes = 70;
  t.success_rate = 0.7;
  stats.with_cross_tier.primary.push_back(t);
  stats.with_cross_tier.mean_primary_rate = 0.8;

  t.success_rate = 0.95;
  stats.without_cross_tier.primary.push_back(t);
  t.success_rate = 0.85;
  stats.without_cross_tier.primary.push_back(t);
  stats.without_cross_tier.mean_primary_rate = 0.9;

  t.success_rate = 0.5;
  t.raw_rate = 0.45;
  stats.with_cross_tier.secondary.push_back(t);
  stats.with_cross_tier.mean_secondary_rate = 0.5;
  t.success_rate = 0.6;
  stats.without_cross_tier.secondary.push_back(t);
  stats.without_cross_tier.mean_secondary_rate = 0.6;

  std::vector<StrategyRow> rows{fixed_strategy(0, 0.2, 1.0, 0.5)};
  rows[0].feasible = true;
  const ExperimentSummary s = summarize(stats, rows);
  EXPECT_EQ(s.blocks, 100);
  EXPECT_EQ(s.primary_pairs, 2);
  EXPECT_EQ(s.secondary_pairs, 1);
  EXPECT_EQ(s.feasible_secondary, 1);
  EXPECT_DOUBLE_EQ(s.mean_primary_rate_on, 0.8);
  EXPECT_DOUBLE_EQ(s.mean_primary_rate_off, 0.9);
  EXPECT_NEAR(s.primary_degradation, (0.8 - 0.9) / 0.9, 1e-15);
  EXPECT_DOUBLE_EQ(s.mean_secondary_rate_on, 0.5);
  EXPECT_DOUBLE_EQ(s.mean_secondary_rate_off, 0.6);
  EXPECT_DOUBLE_EQ(s.mean_secondary_raw_rate_on, 0.45);
}

TEST(CsvOutput, PinnedHeadersAndDeterministicBytes) {
  const Scenario sc = dense_reference_scenario();
  const Deployment dep =
      deploy(sc, SimWindow::square(3.0), PairCounts{2, 3}, RngSpec{41, 0});
  const std::vector<StrategyRow> rows = optimize_all(dep, sc);
  const SuccessStats stats =
      compare_cross_tier(dep, rows, sc, 500, RngSpec{6, 0});
  const ExperimentSummary summary = summarize(stats, rows);

  std::ostringstream pairs_a;
  std::ostringstream pairs_b;
  write_pairs_csv(pairs_a, dep, rows, sc);
  write_pairs_csv(pairs_b, dep, rows, sc);
  EXPECT_EQ(pairs_a.str(), pairs_b.str());
  EXPECT_EQ(pairs_a.str().rfind("pair,tier,distance,power,access_prob,objective\n", 0),
            0u);
  // Primary rows leave the objective column empty.
  EXPECT_NE(pairs_a.str().find(",primary,"), std::string::npos);
  EXPECT_NE(pairs_a.str().find(",\n"), std::string::npos);

  std::ostringstream success_a;
  std::ostringstream success_b;
  write_success_csv(success_a, stats);
  write_success_csv(success_b, stats);
  const std::string success_text = success_a.str();
  EXPECT_EQ(success_text, success_b.str());
  EXPECT_EQ(success_text.rfind(
                "pair,tier,attempts,successes,rate_on,rate_off,raw_rate\n", 0),
            0u);
  const std::size_t lines = static_cast<std::size_t>(
      std::count(success_text.begin(), success_text.end(), '\n'));
  EXPECT_EQ(lines, 1u + 2u + 3u);

  std::ostringstream sum_a;
  write_summary_csv(sum_a, summary);
  EXPECT_EQ(sum_a.str().rfind("metric,value\n", 0), 0u);
  EXPECT_NE(sum_a.str().find("primary_degradation,"), std::string::npos);
  EXPECT_NE(sum_a.str().find("mean_secondary_raw_rate_on,"),
            std::string::npos);
}

}  // namespace
}  // namespace underlay
