#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "underlay/model.hpp"
#include "underlay/montecarlo.hpp"
#include "underlay/optimizer.hpp"
#include "underlay/rng.hpp"

namespace underlay {

struct PairPlacement {
  Vec2 transmitter;
  Vec2 receiver;
  double distance = 0.0;
};

// Concrete positioned network: transmitters dropped in the window, each
// receiver within pairing_range of its transmitter.
struct Deployment {
  SimWindow window = SimWindow::square(1.0);
  std::vector<PairPlacement> primary;
  std::vector<PairPlacement> secondary;
};

struct PairCounts {
  std::int64_t primary = 0;
  std::int64_t secondary = 0;
};

// Transmitters uniform in the window, receivers uniform in the disk of
// radius pairing_range around their transmitter.  Fixed counts when given;
// otherwise Poisson counts from the tier densities (both deployment styles
// are part of the modeled system).
Deployment deploy(const Scenario& scenario, const SimWindow& window,
                  std::optional<PairCounts> counts, const RngSpec& spec);

// The strategy one secondary pair adopts, with the planner outcome.
// Infeasible pairs fall back to silence (access 0) and are marked.
struct StrategyRow {
  std::size_t pair_index = 0;
  double distance = 0.0;
  Strategy strategy;
  double objective = 0.0;
  bool feasible = false;
};

// Runs the planner independently for every secondary pair.
std::vector<StrategyRow> optimize_all(const Deployment& deployment,
                                      const Scenario& scenario);

enum class CrossTier { on, off };

struct PairTally {
  std::int64_t attempts = 0;
  std::int64_t successes = 0;
  double success_rate = 0.0;  // successes / attempts, 0 when never attempted
  double raw_rate = 0.0;      // successes / (access_prob * blocks)
};

struct BlockTally {
  std::int64_t blocks = 0;
  std::vector<PairTally> primary;
  std::vector<PairTally> secondary;
  double mean_primary_rate = 0.0;
  double mean_secondary_rate = 0.0;
};

// Simulates the given number of resource blocks over the fixed geometry.
// Per block every transmitter draws Bernoulli activity and every active
// transmitter fresh Rayleigh fading toward every receiver; a pair scores a
// success when it transmitted and its receiver's SINR cleared the tier
// threshold.  CrossTier::off zeroes both cross-tier weights while reusing
// the identical activity and fading draws, so the off run is the common-
// random-numbers counterfactual of the on run.
BlockTally run_resource_blocks(const Deployment& deployment,
                               std::span<const StrategyRow> strategies,
                               const Scenario& scenario, std::int64_t blocks,
                               CrossTier cross_tier, const RngSpec& spec,
                               int threads = 0);

struct SuccessStats {
  BlockTally with_cross_tier;
  BlockTally without_cross_tier;
};

// Both counterfactuals from one pass over the draws.
SuccessStats compare_cross_tier(const Deployment& deployment,
                                std::span<const StrategyRow> strategies,
                                const Scenario& scenario, std::int64_t blocks,
                                const RngSpec& spec, int threads = 0);

struct ExperimentSummary {
  std::int64_t blocks = 0;
  std::int64_t primary_pairs = 0;
  std::int64_t secondary_pairs = 0;
  std::int64_t feasible_secondary = 0;
  double mean_primary_rate_on = 0.0;
  double mean_primary_rate_off = 0.0;
  double primary_degradation = 0.0;  // (on - off) / off, negative when on < off
  double mean_secondary_rate_on = 0.0;
  double mean_secondary_rate_off = 0.0;
  double mean_secondary_raw_rate_on = 0.0;
};

ExperimentSummary summarize(const SuccessStats& stats,
                            std::span<const StrategyRow> strategies);

// CSV emitters with pinned headers; numbers use shortest round-trip
// formatting so identical inputs give byte-identical files.
void write_pairs_csv(std::ostream& out, const Deployment& deployment,
                     std::span<const StrategyRow> strategies,
                     const Scenario& scenario);
void write_success_csv(std::ostream& out, const SuccessStats& stats);
void write_summary_csv(std::ostream& out, const ExperimentSummary& summary);

}  // namespace underlay
