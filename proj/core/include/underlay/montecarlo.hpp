#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "underlay/analytic.hpp"
#include "underlay/model.hpp"
#include "underlay/rng.hpp"

namespace underlay {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Finite sampling region centered on the receiver under test.
struct SimWindow {
  enum class Shape { square, disk };

  Shape shape = Shape::disk;
  double extent = 0.0;  // half side length (square) or radius (disk)

  static SimWindow square(double half_side);
  static SimWindow disk(double radius);

  // Window large enough that truncating each interfering field at its edge
  // biases the link's connection probability by at most bias_tol, clamped
  // to no less than five pairing ranges.
  static SimWindow for_link(const LinkQuery& link, const Scenario& scenario,
                            double bias_tol = 1e-3);

  double area() const;
  double circumradius() const;
};

struct Estimate {
  double mean = 0.0;
  std::int64_t trials = 0;
  double ci95_halfwidth = 0.0;
};

// Radius beyond which the expected interference contribution of a
// Rayleigh-faded Poisson field changes the Laplace exponent by less than
// bias_tol.  u is the scaled Laplace argument (s * gamma * power_ratio).
double truncation_radius(double u, double thinned_density,
                         const ChannelParams& channel, double bias_tol);

// Worst case over both interfering tiers for the given link, clamped to at
// least the primary pairing range.
double truncation_radius(const LinkQuery& link, const Scenario& scenario,
                         double bias_tol);

// One draw of a homogeneous Poisson process restricted to the window.
std::vector<Vec2> sample_ppp(double density, const SimWindow& window,
                             Rng& rng);
std::vector<Vec2> sample_ppp(double density, const SimWindow& window,
                             const RngSpec& spec);

// Aggregate received power at the origin from the given transmitter
// positions: each point independently transmits with probability
// access_prob and contributes power * gamma * fading * path gain.
double interference_realization(std::span<const Vec2> points, double power,
                                double gamma, double access_prob,
                                const ChannelParams& channel, Rng& rng);

// Fraction of trials in which the link's SINR realization clears its
// tier's threshold, with both tiers drawn fresh each trial inside the
// window.  Identical (scenario, trials, window, seed) give bit-identical
// results for every thread count; threads = 0 uses the hardware count.
Estimate estimate_connection_probability(const LinkQuery& link,
                                         const Scenario& scenario,
                                         std::int64_t trials,
                                         const SimWindow& window,
                                         const RngSpec& spec,
                                         int threads = 0);

// Convenience overload using SimWindow::for_link.
Estimate estimate_connection_probability(const LinkQuery& link,
                                         const Scenario& scenario,
                                         std::int64_t trials,
                                         const RngSpec& spec,
                                         int threads = 0);

}  // namespace underlay
