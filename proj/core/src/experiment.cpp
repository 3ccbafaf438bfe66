#include "underlay/experiment.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "underlay/analytic.hpp"
#include "underlay/detail/parallel.hpp"

namespace underlay {

namespace {

Vec2 sample_window_point(const SimWindow& window, Rng& rng) {
  const double e = window.extent;
  if (window.shape == SimWindow::Shape::square) {
    const double x = rng.uniform(-e, e);
    const double y = rng.uniform(-e, e);
    return {x, y};
  }
  for (;;) {
    const double x = rng.uniform(-e, e);
    const double y = rng.uniform(-e, e);
    if (x * x + y * y <= e * e) return {x, y};
  }
}

PairPlacement sample_pair(const SimWindow& window, double range, Rng& rng) {
  const Vec2 tx = sample_window_point(window, rng);
  const double r = range * std::sqrt(rng.uniform());
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const Vec2 rx{tx.x + r * std::cos(angle), tx.y + r * std::sin(angle)};
  return {tx, rx, r};
}

void append_number(std::string& out, double v) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

void append_number(std::string& out, std::int64_t v) {
  std::array<char, 24> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

// Per-worker success/attempt counters; merged by elementwise integer
// addition, so the reduction is order-insensitive.
struct BlockCounts {
  std::vector<std::int64_t> attempts;
  std::vector<std::int64_t> successes_on;
  std::vector<std::int64_t> successes_off;

  explicit BlockCounts(std::size_t pairs)
      : attempts(pairs, 0), successes_on(pairs, 0), successes_off(pairs, 0) {}
};

struct TransmitterInfo {
  double power = 0.0;
  double access_prob = 0.0;
  Tier tier = Tier::primary;
};

PairTally make_tally(std::int64_t attempts, std::int64_t successes,
                     double access_prob, std::int64_t blocks) {
  PairTally t;
  t.attempts = attempts;
  t.successes = successes;
  t.success_rate = attempts > 0
                       ? static_cast<double>(successes) /
                             static_cast<double>(attempts)
                       : 0.0;
  const double expected_attempts =
      access_prob * static_cast<double>(blocks);
  t.raw_rate = expected_attempts > 0.0
                   ? static_cast<double>(successes) / expected_attempts
                   : 0.0;
  return t;
}

double mean_rate(const std::vector<PairTally>& tallies) {
  if (tallies.empty()) return 0.0;
  double sum = 0.0;
  for (const PairTally& t : tallies) sum += t.success_rate;
  return sum / static_cast<double>(tallies.size());
}

SuccessStats run_blocks_both(const Deployment& dep,
                             std::span<const StrategyRow> strategies,
                             const Scenario& sc, std::int64_t blocks,
                             const RngSpec& spec, int threads) {
  const std::size_t n_primary = dep.primary.size();
  const std::size_t n_secondary = dep.secondary.size();
  const std::size_t n_pairs = n_primary + n_secondary;
  if (strategies.size() != n_secondary) {
    throw std::invalid_argument(
        "run_resource_blocks: one strategy per secondary pair required");
  }
  if (blocks < 1) {
    throw std::invalid_argument("run_resource_blocks: need at least 1 block");
  }

  std::vector<TransmitterInfo> tx(n_pairs);
  for (std::size_t i = 0; i < n_primary; ++i) {
    tx[i] = {sc.primary.power, sc.primary.access_prob, Tier::primary};
  }
  for (std::size_t i = 0; i < n_secondary; ++i) {
    const Strategy& st = strategies[i].strategy;
    tx[n_primary + i] = {st.power, st.access_prob, Tier::secondary};
  }

  // Receiver i belongs to pair i; gain[t * n_pairs + r] is the path gain
  // from transmitter t to receiver r over the fixed geometry.
  std::vector<double> gain(n_pairs * n_pairs);
  auto rx_of = [&](std::size_t r) -> const Vec2& {
    return r < n_primary ? dep.primary[r].receiver
                         : dep.secondary[r - n_primary].receiver;
  };
  auto tx_of = [&](std::size_t t) -> const Vec2& {
    return t < n_primary ? dep.primary[t].transmitter
                         : dep.secondary[t - n_primary].transmitter;
  };
  for (std::size_t t = 0; t < n_pairs; ++t) {
    const Vec2& a = tx_of(t);
    for (std::size_t r = 0; r < n_pairs; ++r) {
      const Vec2& b = rx_of(r);
      const double d = std::hypot(a.x - b.x, a.y - b.y);
      gain[t * n_pairs + r] = path_loss(d, sc.channel);
    }
  }

  const double noise = sc.channel.noise;
  auto body = [&](BlockCounts& acc, std::int64_t block) {
    Rng rng(spec, static_cast<std::uint64_t>(block));

    thread_local std::vector<bool> active;
    thread_local std::vector<double> signal;
    thread_local std::vector<double> same_raw;
    thread_local std::vector<double> cross_raw;
    active.assign(n_pairs, false);
    signal.assign(n_pairs, 0.0);
    same_raw.assign(n_pairs, 0.0);
    cross_raw.assign(n_pairs, 0.0);

    for (std::size_t t = 0; t < n_pairs; ++t) {
      active[t] = rng.bernoulli(tx[t].access_prob);
    }
    for (std::size_t t = 0; t < n_pairs; ++t) {
      if (!active[t]) continue;
      const double power = tx[t].power;
      for (std::size_t r = 0; r < n_pairs; ++r) {
        const double received =
            power * rng.exponential() * gain[t * n_pairs + r];
        if (t == r) {
          signal[r] = received;
        } else if (tx[t].tier == tx[r].tier) {
          same_raw[r] += received;
        } else {
          cross_raw[r] += received;
        }
      }
    }

    for (std::size_t r = 0; r < n_pairs; ++r) {
      if (!active[r]) continue;
      acc.attempts[r] += 1;
      const Tier tier = tx[r].tier;
      const double q = tier_params(sc, tier).sinr_threshold;
      const double same =
          same_tier_weight(sc.weights, tier) * same_raw[r];
      const double cross =
          cross_tier_weight(sc.weights, tier) * cross_raw[r];
      if (signal[r] >= q * (noise + same + cross)) acc.successes_on[r] += 1;
      if (signal[r] >= q * (noise + same)) acc.successes_off[r] += 1;
    }
  };

  const BlockCounts totals = detail::parallel_reduce<BlockCounts>(
      blocks, threads, BlockCounts(n_pairs), body,
      [](BlockCounts& into, const BlockCounts& from) {
        for (std::size_t i = 0; i < into.attempts.size(); ++i) {
          into.attempts[i] += from.attempts[i];
          into.successes_on[i] += from.successes_on[i];
          into.successes_off[i] += from.successes_off[i];
        }
      });

  auto build = [&](const std::vector<std::int64_t>& successes) {
    BlockTally tally;
    tally.blocks = blocks;
    tally.primary.reserve(n_primary);
    tally.secondary.reserve(n_secondary);
    for (std::size_t i = 0; i < n_pairs; ++i) {
      const PairTally t = make_tally(totals.attempts[i], successes[i],
                                     tx[i].access_prob, blocks);
      if (i < n_primary) {
        tally.primary.push_back(t);
      } else {
        tally.secondary.push_back(t);
      }
    }
    tally.mean_primary_rate = mean_rate(tally.primary);
    tally.mean_secondary_rate = mean_rate(tally.secondary);
    return tally;
  };

  return {build(totals.successes_on), build(totals.successes_off)};
}

}  // namespace

Deployment deploy(const Scenario& sc, const SimWindow& window,
                  std::optional<PairCounts> counts, const RngSpec& spec) {
  Rng rng(spec);
  std::int64_t n_primary;
  std::int64_t n_secondary;
  if (counts) {
    if (counts->primary < 0 || counts->secondary < 0) {
      throw std::invalid_argument("deploy: pair counts must be >= 0");
    }
    n_primary = counts->primary;
    n_secondary = counts->secondary;
  } else {
    n_primary = rng.poisson(sc.primary.density * window.area());
    n_secondary = rng.poisson(sc.secondary.density * window.area());
  }

  Deployment dep;
  dep.window = window;
  dep.primary.reserve(static_cast<std::size_t>(n_primary));
  dep.secondary.reserve(static_cast<std::size_t>(n_secondary));
  const double range = sc.qos.pairing_range;
  for (std::int64_t i = 0; i < n_primary; ++i) {
    dep.primary.push_back(sample_pair(window, range, rng));
  }
  for (std::int64_t i = 0; i < n_secondary; ++i) {
    dep.secondary.push_back(sample_pair(window, range, rng));
  }
  return dep;
}

std::vector<StrategyRow> optimize_all(const Deployment& dep,
                                      const Scenario& sc) {
  std::vector<StrategyRow> rows;
  rows.reserve(dep.secondary.size());
  for (std::size_t i = 0; i < dep.secondary.size(); ++i) {
    StrategyRow row;
    row.pair_index = i;
    row.distance = dep.secondary[i].distance;
    try {
      const OptimalStrategy solved = solve(row.distance, sc);
      row.strategy = solved.strategy;
      row.objective = solved.objective;
      row.feasible = true;
    } catch (const InfeasibleError&) {
      row.strategy = {sc.bounds.lo, 0.0};
      row.objective = 0.0;
      row.feasible = false;
    }
    rows.push_back(row);
  }
  return rows;
}

BlockTally run_resource_blocks(const Deployment& dep,
                               std::span<const StrategyRow> strategies,
                               const Scenario& sc, std::int64_t blocks,
                               CrossTier cross_tier, const RngSpec& spec,
                               int threads) {
  SuccessStats both =
      run_blocks_both(dep, strategies, sc, blocks, spec, threads);
  return cross_tier == CrossTier::on ? std::move(both.with_cross_tier)
                                     : std::move(both.without_cross_tier);
}

SuccessStats compare_cross_tier(const Deployment& dep,
                                std::span<const StrategyRow> strategies,
                                const Scenario& sc, std::int64_t blocks,
                                const RngSpec& spec, int threads) {
  return run_blocks_both(dep, strategies, sc, blocks, spec, threads);
}

ExperimentSummary summarize(const SuccessStats& stats,
                            std::span<const StrategyRow> strategies) {
  const BlockTally& on = stats.with_cross_tier;
  const BlockTally& off = stats.without_cross_tier;

  ExperimentSummary s;
  s.blocks = on.blocks;
  s.primary_pairs = static_cast<std::int64_t>(on.primary.size());
  s.secondary_pairs = static_cast<std::int64_t>(on.secondary.size());
  for (const StrategyRow& row : strategies) {
    if (row.feasible) ++s.feasible_secondary;
  }
  s.mean_primary_rate_on = on.mean_primary_rate;
  s.mean_primary_rate_off = off.mean_primary_rate;
  s.primary_degradation =
      off.mean_primary_rate > 0.0
          ? (on.mean_primary_rate - off.mean_primary_rate) /
                off.mean_primary_rate
          : 0.0;
  s.mean_secondary_rate_on = on.mean_secondary_rate;
  s.mean_secondary_rate_off = off.mean_secondary_rate;

  double raw_sum = 0.0;
  for (const PairTally& t : on.secondary) raw_sum += t.raw_rate;
  s.mean_secondary_raw_rate_on =
      on.secondary.empty()
          ? 0.0
          : raw_sum / static_cast<double>(on.secondary.size());
  return s;
}

void write_pairs_csv(std::ostream& out, const Deployment& dep,
                     std::span<const StrategyRow> strategies,
                     const Scenario& sc) {
  std::string buf = "pair,tier,distance,power,access_prob,objective\n";
  for (std::size_t i = 0; i < dep.primary.size(); ++i) {
    append_number(buf, static_cast<std::int64_t>(i));
    buf += ",primary,";
    append_number(buf, dep.primary[i].distance);
    buf += ',';
    append_number(buf, sc.primary.power);
    buf += ',';
    append_number(buf, sc.primary.access_prob);
    buf += ",\n";
  }
  for (const StrategyRow& row : strategies) {
    append_number(buf, static_cast<std::int64_t>(row.pair_index));
    buf += ",secondary,";
    append_number(buf, row.distance);
    buf += ',';
    append_number(buf, row.strategy.power);
    buf += ',';
    append_number(buf, row.strategy.access_prob);
    buf += ',';
    append_number(buf, row.objective);
    buf += '\n';
  }
  out << buf;
}

void write_success_csv(std::ostream& out, const SuccessStats& stats) {
  std::string buf =
      "pair,tier,attempts,successes,rate_on,rate_off,raw_rate\n";
  auto emit = [&](const char* tier, const std::vector<PairTally>& on,
                  const std::vector<PairTally>& off) {
    for (std::size_t i = 0; i < on.size(); ++i) {
      append_number(buf, static_cast<std::int64_t>(i));
      buf += ',';
      buf += tier;
      buf += ',';
      append_number(buf, on[i].attempts);
      buf += ',';
      append_number(buf, on[i].successes);
      buf += ',';
      append_number(buf, on[i].success_rate);
      buf += ',';
      append_number(buf, off[i].success_rate);
      buf += ',';
      append_number(buf, on[i].raw_rate);
      buf += '\n';
    }
  };
  emit("primary", stats.with_cross_tier.primary,
       stats.without_cross_tier.primary);
  emit("secondary", stats.with_cross_tier.secondary,
       stats.without_cross_tier.secondary);
  out << buf;
}

void write_summary_csv(std::ostream& out, const ExperimentSummary& s) {
  std::string buf = "metric,value\n";
  auto emit_int = [&](const char* name, std::int64_t v) {
    buf += name;
    buf += ',';
    append_number(buf, v);
    buf += '\n';
  };
  auto emit_real = [&](const char* name, double v) {
    buf += name;
    buf += ',';
    append_number(buf, v);
    buf += '\n';
  };
  emit_int("blocks", s.blocks);
  emit_int("primary_pairs", s.primary_pairs);
  emit_int("secondary_pairs", s.secondary_pairs);
  emit_int("feasible_secondary", s.feasible_secondary);
  emit_real("mean_primary_rate_on", s.mean_primary_rate_on);
  emit_real("mean_primary_rate_off", s.mean_primary_rate_off);
  emit_real("primary_degradation", s.primary_degradation);
  emit_real("mean_secondary_rate_on", s.mean_secondary_rate_on);
  emit_real("mean_secondary_rate_off", s.mean_secondary_rate_off);
  emit_real("mean_secondary_raw_rate_on", s.mean_secondary_raw_rate_on);
  out << buf;
}

}  // namespace underlay
