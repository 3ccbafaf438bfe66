#pragma once

#include <optional>
#include <stdexcept>

#include "underlay/model.hpp"

namespace underlay {

// Result of maximizing the density of successful secondary transmissions
// subject to the primary QoS constraint.  constraint_value is the primary
// connection probability at half the pairing range under the returned
// strategy; boundary_active marks solutions sitting on that constraint.
struct OptimalStrategy {
  Strategy strategy;
  double objective = 0.0;
  double constraint_value = 0.0;
  bool boundary_active = false;
  bool zero_objective = false;
};

// Thrown when the primary tier cannot meet its own QoS target even with
// the secondary tier silent; carries that baseline connection probability.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(double primary_only);

  double primary_only_connection() const { return primary_only_; }

 private:
  double primary_only_;
};

// Subset of scenario fields a caller typically varies per link; everything
// else is taken from the defaults scenario.
struct PlannerInputs {
  double eta;
  double primary_power;
  double primary_access_prob;
  double secondary_weight;        // same-tier weight bb
  double secondary_to_primary_weight;  // cross-tier weight ba
  double link_distance;
};

// Primary connection probability at half the pairing range when the
// secondary tier operates at the given strategy.
double primary_constraint(const Strategy& strategy, const Scenario& scenario);

// True when the strategy respects the power bounds, a valid access
// probability and the primary QoS constraint.
bool feasible(const Strategy& strategy, const Scenario& scenario);

// Largest admissible secondary power at the given access probability, or
// nullopt when even bounds.lo violates the QoS constraint.  The returned
// power always satisfies the constraint (never overshoots it).
std::optional<double> boundary_power(double access_prob,
                                     const Scenario& scenario,
                                     double power_tol = 1e-9);

// Maximizes access_prob * density * connection_probability over the
// feasible set for a secondary link of the given length.  Throws
// InfeasibleError when no strategy is feasible.  Ties within 1e-9 of the
// best objective resolve to the lowest power, then lowest access.
OptimalStrategy solve(double link_distance, const Scenario& scenario);

// Applies the planner inputs onto the defaults and solves.
OptimalStrategy plan_transmission(const PlannerInputs& inputs,
                                  const Scenario& defaults);

}  // namespace underlay
