#include "underlay/optimizer.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <vector>

#include "underlay/analytic.hpp"

namespace underlay {

namespace {

constexpr int kGridPoints = 64;
constexpr double kTieTol = 1e-9;
constexpr double kPolishTol = 1e-6;
constexpr double kInvPhi = 0.61803398874989485;

struct Candidate {
  Strategy strategy;
  double objective = -1.0;  // negative marks "no candidate"

  bool valid() const { return objective >= 0.0; }
};

// Prefers higher objective; within kTieTol prefers lower power, then lower
// access probability.
bool better(const Candidate& a, const Candidate& b) {
  if (!a.valid()) return false;
  if (!b.valid()) return true;
  if (a.objective > b.objective + kTieTol) return true;
  if (b.objective > a.objective + kTieTol) return false;
  if (a.strategy.power != b.strategy.power) {
    return a.strategy.power < b.strategy.power;
  }
  return a.strategy.access_prob < b.strategy.access_prob;
}

template <class F>
double golden_max(F&& f, double a, double b, double tol) {
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

std::string format_double(double v) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

InfeasibleError::InfeasibleError(double primary_only)
    : std::runtime_error(
          "primary QoS unreachable even with the secondary tier silent "
          "(connection probability " +
          format_double(primary_only) + ")"),
      primary_only_(primary_only) {}

double primary_constraint(const Strategy& st, const Scenario& sc) {
  const Scenario applied = apply_strategy(sc, st);
  return connection_probability(
      {Tier::primary, sc.qos.pairing_range / 2.0}, applied);
}

bool feasible(const Strategy& st, const Scenario& sc) {
  if (!(st.power >= sc.bounds.lo && st.power <= sc.bounds.hi)) return false;
  if (!(st.access_prob >= 0.0 && st.access_prob <= 1.0)) return false;
  return primary_constraint(st, sc) >= sc.qos.min_connection_prob;
}

std::optional<double> boundary_power(double access_prob, const Scenario& sc,
                                     double power_tol) {
  if (!(access_prob >= 0.0 && access_prob <= 1.0)) {
    throw std::invalid_argument(
        "boundary_power: access probability must be in [0, 1]");
  }
  const double qos = sc.qos.min_connection_prob;
  auto h = [&](double power) {
    return primary_constraint({power, access_prob}, sc);
  };

  if (h(sc.bounds.hi) >= qos) return sc.bounds.hi;
  double lo = sc.bounds.lo;
  double hi = sc.bounds.hi;
  double h_lo = h(lo);
  if (h_lo < qos) return std::nullopt;

  // h(lo) >= qos > h(hi); h is strictly decreasing on this branch.  Keep
  // the feasible endpoint so the result never violates the constraint.
  for (int i = 0; i < 200; ++i) {
    if (hi - lo <= power_tol && h_lo - qos <= 1e-7) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double h_mid = h(mid);
    if (h_mid >= qos) {
      lo = mid;
      h_lo = h_mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

OptimalStrategy solve(double link_distance, const Scenario& sc) {
  if (!(link_distance >= 0.0)) {
    throw std::invalid_argument("solve: link distance must be >= 0");
  }

  const double qos = sc.qos.min_connection_prob;
  const double primary_only = primary_constraint({sc.bounds.lo, 0.0}, sc);
  if (primary_only < qos) throw InfeasibleError(primary_only);

  auto objective_of = [&](const Strategy& st) {
    return spatial_density(st, link_distance, sc);
  };
  auto boundary_candidate = [&](double p) -> Candidate {
    const auto power = boundary_power(p, sc);
    if (!power) return {};
    const Strategy st{*power, p};
    return {st, objective_of(st)};
  };

  // Coarse sweep: for each access probability, the constraint boundary plus
  // every feasible power grid point below it.  The boundary curve carries
  // the maximizer; the grid is a safety net for flat or degenerate cases.
  Candidate best;
  std::array<double, kGridPoints> boundary_objective{};
  boundary_objective.fill(-1.0);
  std::array<double, kGridPoints> access_grid{};
  for (int j = 0; j < kGridPoints; ++j) {
    const double p = static_cast<double>(j) / (kGridPoints - 1);
    access_grid[static_cast<std::size_t>(j)] = p;
    const Candidate on_boundary = boundary_candidate(p);
    if (!on_boundary.valid()) continue;
    boundary_objective[static_cast<std::size_t>(j)] = on_boundary.objective;
    if (better(on_boundary, best)) best = on_boundary;

    const double limit = on_boundary.strategy.power;
    for (int i = 0; i < kGridPoints; ++i) {
      const double power =
          sc.bounds.lo +
          (sc.bounds.hi - sc.bounds.lo) * static_cast<double>(i) /
              (kGridPoints - 1);
      if (power > limit) break;
      const Candidate cell{{power, p}, objective_of({power, p})};
      if (better(cell, best)) best = cell;
    }
  }

  // Refine around the top local maxima of the boundary curve.
  std::vector<int> peaks;
  for (int j = 0; j < kGridPoints; ++j) {
    const double v = boundary_objective[static_cast<std::size_t>(j)];
    if (v < 0.0) continue;
    const double left =
        j > 0 ? boundary_objective[static_cast<std::size_t>(j - 1)] : -1.0;
    const double right = j + 1 < kGridPoints
                             ? boundary_objective[static_cast<std::size_t>(j + 1)]
                             : -1.0;
    if (v >= left && v >= right) peaks.push_back(j);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int a, int b) {
    return boundary_objective[static_cast<std::size_t>(a)] >
           boundary_objective[static_cast<std::size_t>(b)];
  });
  if (peaks.size() > 3) peaks.resize(3);

  for (int j : peaks) {
    const double lo = access_grid[static_cast<std::size_t>(std::max(0, j - 1))];
    const double hi =
        access_grid[static_cast<std::size_t>(std::min(kGridPoints - 1, j + 1))];
    const double p_star = golden_max(
        [&](double p) { return boundary_candidate(p).objective; }, lo, hi,
        kPolishTol);
    const Candidate refined = boundary_candidate(p_star);
    if (better(refined, best)) best = refined;
  }

  // Polish the power axis at the chosen access probability.
  if (best.valid() && best.strategy.access_prob > 0.0) {
    const auto limit = boundary_power(best.strategy.access_prob, sc);
    if (limit) {
      const double p = best.strategy.access_prob;
      const double power_star = golden_max(
          [&](double power) { return objective_of({power, p}); },
          sc.bounds.lo, *limit, kPolishTol);
      const Candidate polished{{power_star, p}, objective_of({power_star, p})};
      if (better(polished, best)) best = polished;
    }
  }

  if (!best.valid()) {
    // Unreachable once the silent strategy is feasible; keep a hard stop
    // rather than returning garbage.
    throw InfeasibleError(primary_only);
  }

  OptimalStrategy out;
  out.strategy = best.strategy;
  out.objective = std::max(best.objective, 0.0);
  out.constraint_value = primary_constraint(best.strategy, sc);
  out.boundary_active = std::abs(out.constraint_value - qos) <= 1e-6;
  out.zero_objective = out.objective == 0.0;
  return out;
}

OptimalStrategy plan_transmission(const PlannerInputs& in,
                                  const Scenario& defaults) {
  Scenario sc = defaults;
  sc.channel.eta = in.eta;
  sc.primary.power = in.primary_power;
  sc.primary.access_prob = in.primary_access_prob;
  sc.weights.bb = in.secondary_weight;
  sc.weights.ba = in.secondary_to_primary_weight;

  const ValidationReport report = validate(sc, Use::analytic);
  if (!report.ok()) {
    throw std::invalid_argument("plan_transmission: " +
                                report.errors.front().field + " " +
                                report.errors.front().message);
  }
  return solve(in.link_distance, sc);
}

}  // namespace underlay
