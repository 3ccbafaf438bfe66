#include "underlay/montecarlo.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "underlay/detail/parallel.hpp"

namespace underlay {

namespace {

constexpr double kPi = std::numbers::pi;

// r^eta evaluated from r^2.  Exponents that are multiples of 1/2 reduce to
// integer powers and square roots, which is markedly cheaper than pow in
// the sampling loop.
struct PowHalfEta {
  int whole = 0;
  int quarters = 0;  // fractional part of eta/2 in units of 1/4
  bool general = false;
  double half_eta = 0.0;

  explicit PowHalfEta(double eta) : half_eta(0.5 * eta) {
    const double scaled = 4.0 * half_eta;
    if (scaled == std::floor(scaled) && scaled < 512.0) {
      whole = static_cast<int>(half_eta);
      quarters = static_cast<int>(scaled) - 4 * whole;
    } else {
      general = true;
    }
  }

  double operator()(double r2) const {
    if (general) return std::pow(r2, half_eta);
    double acc = 1.0;
    double base = r2;
    for (int e = whole; e > 0; e >>= 1) {
      if (e & 1) acc *= base;
      base *= base;
    }
    switch (quarters) {
      case 1: return acc * std::sqrt(std::sqrt(r2));
      case 2: return acc * std::sqrt(r2);
      case 3: return acc * std::sqrt(r2) * std::sqrt(std::sqrt(r2));
      default: return acc;
    }
  }
};

struct FieldParams {
  double density = 0.0;      // full (unthinned) transmitter density
  double access_prob = 0.0;
  double coefficient = 0.0;  // s * gamma * power_ratio applied to the sum
};

void require_window(const SimWindow& window) {
  if (!(window.extent > 0.0) || !std::isfinite(window.extent)) {
    throw std::invalid_argument("window extent must be positive and finite");
  }
}

}  // namespace

SimWindow SimWindow::square(double half_side) {
  SimWindow w{Shape::square, half_side};
  require_window(w);
  return w;
}

SimWindow SimWindow::disk(double radius) {
  SimWindow w{Shape::disk, radius};
  require_window(w);
  return w;
}

double SimWindow::area() const {
  return shape == Shape::square ? 4.0 * extent * extent
                                : kPi * extent * extent;
}

double SimWindow::circumradius() const {
  return shape == Shape::square ? extent * std::numbers::sqrt2 : extent;
}

double truncation_radius(double u, double thinned_density,
                         const ChannelParams& ch, double bias_tol) {
  if (!(ch.eta > 2.0)) {
    throw std::domain_error("truncation_radius: eta must exceed 2");
  }
  if (!(bias_tol > 0.0)) {
    throw std::invalid_argument("truncation_radius: bias_tol must be > 0");
  }
  if (u <= 0.0 || thinned_density <= 0.0) return 0.0;
  // Tail of the Laplace exponent beyond rho is bounded by
  // density * 2*pi * u * rho^(2-eta) / (eta - 2).
  const double base =
      2.0 * kPi * u * thinned_density / ((ch.eta - 2.0) * bias_tol);
  return std::pow(base, 1.0 / (ch.eta - 2.0));
}

double truncation_radius(const LinkQuery& link, const Scenario& sc,
                         double bias_tol) {
  const ChannelParams& ch = sc.channel;
  const TierParams& own = tier_params(sc, link.tier);
  const TierParams& other = tier_params(
      sc, link.tier == Tier::primary ? Tier::secondary : Tier::primary);
  const double s = laplace_argument(own.sinr_threshold, link.distance, ch);

  const double same_u = s * same_tier_weight(sc.weights, link.tier);
  const double cross_u = s * cross_tier_weight(sc.weights, link.tier) *
                         (other.power / own.power);
  const double radius = std::max(
      truncation_radius(same_u, own.access_prob * own.density, ch, bias_tol),
      truncation_radius(cross_u, other.access_prob * other.density, ch,
                        bias_tol));
  return std::max(radius, sc.qos.pairing_range);
}

SimWindow SimWindow::for_link(const LinkQuery& link, const Scenario& sc,
                              double bias_tol) {
  const double radius = std::max(truncation_radius(link, sc, bias_tol),
                                 5.0 * sc.qos.pairing_range);
  return SimWindow::disk(radius);
}

std::vector<Vec2> sample_ppp(double density, const SimWindow& window,
                             Rng& rng) {
  require_window(window);
  if (!(density >= 0.0)) {
    throw std::invalid_argument("sample_ppp: density must be >= 0");
  }
  const std::int64_t n = rng.poisson(density * window.area());
  std::vector<Vec2> points;
  points.reserve(static_cast<std::size_t>(n));
  const double e = window.extent;
  for (std::int64_t i = 0; i < n; ++i) {
    if (window.shape == SimWindow::Shape::square) {
      const double x = rng.uniform(-e, e);
      const double y = rng.uniform(-e, e);
      points.push_back({x, y});
    } else {
      // Rejection from the bounding square keeps the draw primitive-exact.
      for (;;) {
        const double x = rng.uniform(-e, e);
        const double y = rng.uniform(-e, e);
        if (x * x + y * y <= e * e) {
          points.push_back({x, y});
          break;
        }
      }
    }
  }
  return points;
}

std::vector<Vec2> sample_ppp(double density, const SimWindow& window,
                             const RngSpec& spec) {
  Rng rng(spec);
  return sample_ppp(density, window, rng);
}

double interference_realization(std::span<const Vec2> points, double power,
                                double gamma, double access_prob,
                                const ChannelParams& ch, Rng& rng) {
  double total = 0.0;
  for (const Vec2& p : points) {
    const bool active = rng.bernoulli(access_prob);
    if (!active) continue;
    const double fading = rng.exponential();
    const double d = std::sqrt(p.x * p.x + p.y * p.y);
    total += power * gamma * fading * path_loss(d, ch);
  }
  return total;
}

Estimate estimate_connection_probability(const LinkQuery& link,
                                         const Scenario& sc,
                                         std::int64_t trials,
                                         const SimWindow& window,
                                         const RngSpec& spec, int threads) {
  if (trials < 1) {
    throw std::invalid_argument("estimate: need at least one trial");
  }
  require_window(window);
  if (!(sc.channel.eta >= 2.0)) {
    throw std::domain_error("estimate: eta must be at least 2");
  }
  if (!(link.distance >= 0.0)) {
    throw std::invalid_argument("estimate: distance must be >= 0");
  }

  const ChannelParams& ch = sc.channel;
  const TierParams& own = tier_params(sc, link.tier);
  const double s = laplace_argument(own.sinr_threshold, link.distance, ch);
  const double noise_level = s * ch.noise / own.power;

  // Fields are always drawn in primary-then-secondary order so that the
  // consumed random sequence does not depend on which tier is observed.
  const FieldParams primary_field{
      sc.primary.density, sc.primary.access_prob,
      link.tier == Tier::primary
          ? s * sc.weights.aa
          : s * sc.weights.ab * (sc.primary.power / own.power)};
  const FieldParams secondary_field{
      sc.secondary.density, sc.secondary.access_prob,
      link.tier == Tier::secondary
          ? s * sc.weights.bb
          : s * sc.weights.ba * (sc.secondary.power / own.power)};

  const bool square = window.shape == SimWindow::Shape::square;
  const double extent = window.extent;
  const double extent_sq = extent * extent;
  const double area = window.area();
  const double eps = ch.epsilon;
  const PowHalfEta pow_eta(ch.eta);

  // Weighted interference sum of one field; one position draw per point in
  // a disk window because only the squared radius enters the gain.
  auto field_sum = [&](const FieldParams& field, Rng& rng) {
    const std::int64_t n = rng.poisson(field.density * area);
    double sum = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      double r2;
      if (square) {
        const double x = rng.uniform(-extent, extent);
        const double y = rng.uniform(-extent, extent);
        r2 = x * x + y * y;
      } else {
        r2 = extent_sq * rng.uniform();
      }
      const bool active = rng.bernoulli(field.access_prob);
      if (!active) continue;
      const double fading = rng.exponential();
      sum += fading / (eps + pow_eta(r2));
    }
    return sum;
  };

  auto body = [&](std::int64_t& successes, std::int64_t trial) {
    Rng rng(spec, static_cast<std::uint64_t>(trial));
    const double primary_sum = field_sum(primary_field, rng);
    const double secondary_sum = field_sum(secondary_field, rng);
    const double signal_fading = rng.exponential();
    const double required = noise_level +
                            primary_field.coefficient * primary_sum +
                            secondary_field.coefficient * secondary_sum;
    if (signal_fading >= required) ++successes;
  };

  const std::int64_t successes = detail::parallel_reduce<std::int64_t>(
      trials, threads, 0, body,
      [](std::int64_t& acc, std::int64_t part) { acc += part; });

  const double mean =
      static_cast<double>(successes) / static_cast<double>(trials);
  const double ci95 =
      1.96 * std::sqrt(mean * (1.0 - mean) / static_cast<double>(trials));
  return {mean, trials, ci95};
}

Estimate estimate_connection_probability(const LinkQuery& link,
                                         const Scenario& sc,
                                         std::int64_t trials,
                                         const RngSpec& spec, int threads) {
  return estimate_connection_probability(
      link, sc, trials, SimWindow::for_link(link, sc), spec, threads);
}

}  // namespace underlay
