#include "underlay/model.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace underlay {
namespace {

bool names_field(const ValidationReport& report, const std::string& field) {
  return std::any_of(report.errors.begin(), report.errors.end(),
                     [&](const Violation& v) { return v.field == field; });
}

bool warns_about(const ValidationReport& report, const std::string& field) {
  return std::any_of(report.warnings.begin(), report.warnings.end(),
                     [&](const Violation& v) { return v.field == field; });
}

TEST(Validate, DefaultScenarioIsValid) {
  const Scenario sc;
  EXPECT_TRUE(validate(sc, Use::analytic).ok());
  EXPECT_TRUE(validate(sc, Use::monte_carlo).ok());
}

TEST(Validate, EtaAtTwoFailsAnalyticButSimulates) {
  Scenario sc;
  sc.channel.eta = 2.0;
  const ValidationReport analytic = validate(sc, Use::analytic);
  EXPECT_FALSE(analytic.ok());
  EXPECT_TRUE(names_field(analytic, "channel.eta"));

  const ValidationReport mc = validate(sc, Use::monte_carlo);
  EXPECT_TRUE(mc.ok());
  EXPECT_TRUE(warns_about(mc, "channel.eta"));
}

TEST(Validate, EtaBelowTwoFailsBothUses) {
  Scenario sc;
  sc.channel.eta = 1.5;
  EXPECT_FALSE(validate(sc, Use::analytic).ok());
  EXPECT_FALSE(validate(sc, Use::monte_carlo).ok());
}

TEST(Validate, EtaJustAboveTwoWarnsForAnalytic) {
  Scenario sc;
  sc.channel.eta = 2.01;
  const ValidationReport report = validate(sc, Use::analytic);
  EXPECT_TRUE(report.ok());
  EXPECT_TRUE(warns_about(report, "channel.eta"));
}

TEST(Validate, RejectsNegativeChannelFields) {
  Scenario sc;
  sc.channel.epsilon = -0.5;
  sc.channel.noise = -1.0;
  const ValidationReport report = validate(sc);
  EXPECT_TRUE(names_field(report, "channel.epsilon"));
  EXPECT_TRUE(names_field(report, "channel.noise"));
}

TEST(Validate, RejectsOutOfRangeTierParams) {
  Scenario sc;
  sc.primary.access_prob = 1.5;
  sc.secondary.power = 0.0;
  sc.secondary.sinr_threshold = -2.0;
  const ValidationReport report = validate(sc);
  EXPECT_TRUE(names_field(report, "primary.access_prob"));
  EXPECT_TRUE(names_field(report, "secondary.power"));
  EXPECT_TRUE(names_field(report, "secondary.sinr_threshold"));
}

TEST(Validate, RejectsWeightsOutsideUnitInterval) {
  Scenario sc;
  sc.weights.ab = 1.2;
  sc.weights.ba = -0.1;
  const ValidationReport report = validate(sc);
  EXPECT_TRUE(names_field(report, "weights.ab"));
  EXPECT_TRUE(names_field(report, "weights.ba"));
}

TEST(Validate, RejectsBadQosAndBounds) {
  Scenario sc;
  sc.qos.pairing_range = 0.0;
  sc.qos.min_connection_prob = 0.0;
  sc.bounds.lo = 3.0;
  sc.bounds.hi = 2.0;
  const ValidationReport report = validate(sc);
  EXPECT_TRUE(names_field(report, "qos.pairing_range"));
  EXPECT_TRUE(names_field(report, "qos.min_connection_prob"));
  EXPECT_TRUE(names_field(report, "bounds.lo"));
}

TEST(Validate, RejectsNonFiniteValues) {
  Scenario sc;
  sc.primary.density = std::numeric_limits<double>::infinity();
  sc.channel.eta = std::numeric_limits<double>::quiet_NaN();
  const ValidationReport report = validate(sc);
  EXPECT_TRUE(names_field(report, "primary.density"));
  EXPECT_TRUE(names_field(report, "channel.eta"));
}

TEST(TierAccess, SelectsTierAndWeights) {
  Scenario sc;
  sc.primary.density = 0.25;
  sc.secondary.density = 0.75;
  sc.weights = {0.1, 0.2, 0.3, 0.4};

  EXPECT_EQ(tier_params(sc, Tier::primary).density, 0.25);
  EXPECT_EQ(tier_params(sc, Tier::secondary).density, 0.75);
  EXPECT_EQ(same_tier_weight(sc.weights, Tier::primary), 0.1);
  EXPECT_EQ(same_tier_weight(sc.weights, Tier::secondary), 0.4);
  EXPECT_EQ(cross_tier_weight(sc.weights, Tier::primary), 0.3);
  EXPECT_EQ(cross_tier_weight(sc.weights, Tier::secondary), 0.2);
}

TEST(TierAccess, ApplyStrategyTouchesOnlySecondaryKnobs) {
  const Scenario base;
  const Scenario applied = apply_strategy(base, {2.5, 0.125});
  EXPECT_EQ(applied.secondary.power, 2.5);
  EXPECT_EQ(applied.secondary.access_prob, 0.125);
  EXPECT_EQ(applied.primary.power, base.primary.power);
  EXPECT_EQ(applied.secondary.density, base.secondary.density);
  EXPECT_EQ(applied.secondary.sinr_threshold, base.secondary.sinr_threshold);
}

}  // namespace
}  // namespace underlay
