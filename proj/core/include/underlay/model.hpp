#pragma once

#include <string>
#include <vector>

namespace underlay {

// Propagation and receiver-noise parameters shared by both tiers.
// Path gain over distance d is 1 / (epsilon + d^eta); epsilon > 0 keeps the
// gain finite at d = 0, epsilon = 0 gives the unbounded power-law model.
struct ChannelParams {
  double eta = 4.0;      // path-loss exponent, must exceed 2
  double epsilon = 1.0;  // path-loss offset, >= 0
  double noise = 0.0;    // receiver noise power, >= 0
};

// One network tier: transmitter density, transmit power, slotted-access
// probability and the SINR level a receiver needs for successful decoding.
struct TierParams {
  double density = 1.0;         // transmitters per unit area, >= 0
  double power = 1.0;           // transmit power, > 0
  double access_prob = 1.0;     // per-slot transmit probability, in [0, 1]
  double sinr_threshold = 1.0;  // decoding SINR threshold, > 0
};

// Cross-correlation factors in [0, 1] scaling how much power leaks between
// tiers; first letter is the transmitting tier, second the receiving one
// (a = primary, b = secondary).  aa = bb = 1, ab = ba = 0 decouples the tiers.
struct InterferenceWeights {
  double aa = 1.0;
  double ab = 1.0;
  double ba = 1.0;
  double bb = 1.0;
};

// Quality-of-service contract for the primary tier: every primary link of
// length at most pairing_range/2 must connect with probability at least
// min_connection_prob.
struct PrimaryQos {
  double pairing_range = 1.0;        // > 0
  double min_connection_prob = 0.5;  // in (0, 1]
};

// Admissible secondary transmit-power interval.
struct PowerBounds {
  double lo = 0.0;
  double hi = 5.0;
};

// Complete description of a two-tier network instance.
struct Scenario {
  ChannelParams channel;
  TierParams primary;
  TierParams secondary;
  InterferenceWeights weights;
  PrimaryQos qos;
  PowerBounds bounds;
};

// A candidate secondary operating point: transmit power plus access
// probability.
struct Strategy {
  double power = 1.0;
  double access_prob = 1.0;
};

enum class Tier { primary, secondary };

// Downstream consumer of a scenario.  Analytic evaluation needs eta > 2 for
// the interference functionals to converge; simulation only needs finite
// realizations, so it admits eta == 2 (with a warning) but nothing below.
enum class Use { analytic, monte_carlo };

struct Violation {
  std::string field;    // dotted path, e.g. "channel.eta"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> errors;
  std::vector<Violation> warnings;

  bool ok() const { return errors.empty(); }
};

ValidationReport validate(const Scenario& scenario, Use use = Use::analytic);

const TierParams& tier_params(const Scenario& scenario, Tier tier);

// Weight applied to interference from the receiver's own tier.
double same_tier_weight(const InterferenceWeights& weights, Tier receiver);

// Weight applied to interference arriving from the other tier.
double cross_tier_weight(const InterferenceWeights& weights, Tier receiver);

// Copy of the scenario with the secondary power and access probability
// replaced by the given strategy.
Scenario apply_strategy(Scenario scenario, const Strategy& strategy);

}  // namespace underlay
