#pragma once

#include "underlay/model.hpp"

namespace underlay {

// A link to evaluate: receiving tier plus transmitter-receiver distance.
struct LinkQuery {
  Tier tier = Tier::primary;
  double distance = 0.0;
};

// Arguments of the interference Laplace transform for one transmitter tier
// as seen by one receiver.  thinned_density is the tier's density times its
// access probability; power_ratio is interferer power over the receiver's
// own transmitter power; gamma is the cross-correlation weight.
struct LaplaceArgs {
  double s = 0.0;
  double gamma = 1.0;
  double thinned_density = 0.0;
  double power_ratio = 1.0;
};

// Path gain 1 / (epsilon + d^eta).  Throws std::domain_error at d = 0 when
// epsilon = 0, where the gain is unbounded.
double path_loss(double distance, const ChannelParams& channel);

// Closed-form exponent E such that the interference Laplace transform of a
// Poisson field of Rayleigh-faded interferers equals exp(-E).  Requires
// eta > 2; returns 0 when the field is empty or the argument vanishes.
double laplace_exponent(const LaplaceArgs& args, const ChannelParams& channel);

// exp(-laplace_exponent(...)).
double laplace_transform(const LaplaceArgs& args,
                         const ChannelParams& channel);

// Same exponent evaluated by adaptive quadrature of the defining radial
// integral, with the tail mapped onto a finite interval.  Slower than the
// closed form by orders of magnitude; serves as an independent check.
double laplace_exponent_quadrature(const LaplaceArgs& args,
                                   const ChannelParams& channel,
                                   double rel_tol = 1e-10);

// Probability that the link's SINR exceeds the receiving tier's threshold,
// accounting for noise, same-tier and cross-tier interference.  Always
// in [0, 1]; distance 0 with epsilon = 0 is legal and noise-limited.
double connection_probability(const LinkQuery& link, const Scenario& scenario);

// Expected density of successful secondary transmissions at link distance
// d_secondary when the secondary tier operates at the given strategy:
// access_prob * density * connection_probability.
double spatial_density(const Strategy& strategy, double d_secondary,
                       const Scenario& scenario);

// s = threshold * (epsilon + d^eta), the Laplace argument produced by a
// Rayleigh-faded link of length d.  Division-free, so d = 0 is always legal.
double laplace_argument(double sinr_threshold, double distance,
                        const ChannelParams& channel);

}  // namespace underlay
