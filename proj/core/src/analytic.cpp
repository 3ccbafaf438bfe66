#include "underlay/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "underlay/quadrature.hpp"

namespace underlay {

namespace {

constexpr double kPi = std::numbers::pi;

void require_eta(const ChannelParams& ch, const char* where) {
  if (!(ch.eta > 2.0)) {
    throw std::domain_error(std::string(where) +
                            ": path-loss exponent must exceed 2");
  }
}

double scaled_argument(const LaplaceArgs& a) {
  return a.s * a.gamma * a.power_ratio;
}

}  // namespace

double path_loss(double d, const ChannelParams& ch) {
  if (!(d >= 0.0)) {
    throw std::invalid_argument("path_loss: distance must be >= 0");
  }
  const double denom = ch.epsilon + std::pow(d, ch.eta);
  if (denom <= 0.0) {
    throw std::domain_error(
        "path_loss: unbounded gain at distance 0 with epsilon = 0");
  }
  return 1.0 / denom;
}

double laplace_argument(double q, double d, const ChannelParams& ch) {
  return q * (ch.epsilon + std::pow(d, ch.eta));
}

double laplace_exponent(const LaplaceArgs& a, const ChannelParams& ch) {
  require_eta(ch, "laplace_exponent");
  const double u = scaled_argument(a);
  if (u == 0.0 || a.thinned_density == 0.0) return 0.0;
  if (!(u > 0.0) || !(a.thinned_density > 0.0)) {
    throw std::invalid_argument("laplace_exponent: negative argument");
  }
  const double eta = ch.eta;
  const double factor = 2.0 * kPi * kPi / (eta * std::sin(2.0 * kPi / eta));
  return a.thinned_density * factor * u *
         std::pow(ch.epsilon + u, 2.0 / eta - 1.0);
}

double laplace_transform(const LaplaceArgs& a, const ChannelParams& ch) {
  return std::exp(-laplace_exponent(a, ch));
}

double laplace_exponent_quadrature(const LaplaceArgs& a,
                                   const ChannelParams& ch, double rel_tol) {
  require_eta(ch, "laplace_exponent_quadrature");
  if (!(rel_tol > 0.0)) {
    throw std::invalid_argument(
        "laplace_exponent_quadrature: tolerance must be > 0");
  }
  const double u = scaled_argument(a);
  if (u == 0.0 || a.thinned_density == 0.0) return 0.0;
  if (!(u > 0.0) || !(a.thinned_density > 0.0)) {
    throw std::invalid_argument(
        "laplace_exponent_quadrature: negative argument");
  }

  const double eta = ch.eta;
  const double eps = ch.epsilon;
  // Split where the integrand's denominator doubles, then map the tail
  // through r = 1/t so both pieces live on finite intervals.  The tail
  // integrand has an integrable t^(eta-3) endpoint singularity for
  // eta < 3, which the adaptive refinement resolves.
  const double split = std::pow(eps + u, 1.0 / eta);
  auto head = [=](double r) {
    return u * r / (eps + u + std::pow(r, eta));
  };
  auto tail = [=](double t) {
    return u * std::pow(t, eta - 3.0) / (1.0 + (eps + u) * std::pow(t, eta));
  };

  const auto head_part = quad::integrate(head, 0.0, split, rel_tol * 0.5);
  const auto tail_part =
      quad::integrate(tail, 0.0, 1.0 / split, rel_tol * 0.5);
  return a.thinned_density * 2.0 * kPi * (head_part.value + tail_part.value);
}

double connection_probability(const LinkQuery& link, const Scenario& sc) {
  if (!(link.distance >= 0.0)) {
    throw std::invalid_argument(
        "connection_probability: distance must be >= 0");
  }
  const ChannelParams& ch = sc.channel;
  const TierParams& own = tier_params(sc, link.tier);
  const TierParams& other = tier_params(
      sc, link.tier == Tier::primary ? Tier::secondary : Tier::primary);

  if (own.power <= 0.0) return 0.0;

  const double s = laplace_argument(own.sinr_threshold, link.distance, ch);
  const double noise_term = s * ch.noise / own.power;
  const double same = laplace_exponent(
      {s, same_tier_weight(sc.weights, link.tier),
       own.access_prob * own.density, 1.0},
      ch);
  const double cross = laplace_exponent(
      {s, cross_tier_weight(sc.weights, link.tier),
       other.access_prob * other.density, other.power / own.power},
      ch);
  return std::exp(-(noise_term + same + cross));
}

double spatial_density(const Strategy& st, double d_secondary,
                       const Scenario& sc) {
  if (st.access_prob == 0.0) return 0.0;
  const Scenario applied = apply_strategy(sc, st);
  const double h =
      connection_probability({Tier::secondary, d_secondary}, applied);
  return st.access_prob * sc.secondary.density * h;
}

}  // namespace underlay
