#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "underlay/analytic.hpp"
#include "underlay/config.hpp"
#include "underlay/experiment.hpp"
#include "underlay/model.hpp"
#include "underlay/montecarlo.hpp"
#include "underlay/optimizer.hpp"
#include "underlay/version.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitVerification = 3;
constexpr int kExitIo = 4;

constexpr std::uint64_t kDeployStream = 1;
constexpr std::uint64_t kBlocksStream = 2;

std::string fmt(double v) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::vector<double> linspace(double lo, double hi, int steps) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < steps; ++i) {
    out.push_back(lo + (hi - lo) * static_cast<double>(i) / (steps - 1));
  }
  return out;
}

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buf.str();
}

bool write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << content;
    out.flush();
    if (!out) return false;
  }
  fs::rename(tmp, path, ec);
  return !ec;
}

// Loaded configuration plus everything needed for the run manifest.
struct LoadedConfig {
  underlay::Scenario scenario;
  std::string path;
  json overrides = json::object();
};

int load_config(const std::string& path, std::optional<double> eta_override,
                LoadedConfig& out, std::string& error) {
  const auto text = slurp(path);
  if (!text) {
    error = "cannot read config file '" + path + "'";
    return kExitIo;
  }
  try {
    out.scenario = underlay::parse_scenario(*text);
  } catch (const underlay::ConfigError& e) {
    error = e.what();
    return kExitValidation;
  }
  out.path = path;
  if (eta_override) {
    out.scenario.channel.eta = *eta_override;
    out.overrides["eta"] = *eta_override;
  }
  return kExitOk;
}

int require_valid(const underlay::Scenario& sc, underlay::Use use) {
  const underlay::ValidationReport report = underlay::validate(sc, use);
  for (const auto& w : report.warnings) {
    std::cerr << "warning " << w.field << ": " << w.message << "\n";
  }
  if (!report.ok()) {
    for (const auto& e : report.errors) {
      std::cerr << "error " << e.field << ": " << e.message << "\n";
    }
    return kExitValidation;
  }
  return kExitOk;
}

json base_manifest(const char* subcommand, const LoadedConfig& config) {
  return json{{"tool", "underlay"},
              {"version", std::string(underlay::kVersion)},
              {"subcommand", subcommand},
              {"config", config.path},
              {"scenario_hash", underlay::scenario_hash(config.scenario)},
              {"overrides", config.overrides}};
}

// Emits the payload to stdout or, with --out, atomically to disk next to a
// replayable manifest.
int deliver(const std::string& out_path, const std::string& payload,
            json manifest) {
  if (out_path.empty()) {
    std::cout << payload;
    return kExitOk;
  }
  if (!write_atomic(out_path, payload)) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return kExitIo;
  }
  manifest["outputs"] = json::array({fs::path(out_path).filename().string()});
  const std::string manifest_path = out_path + ".manifest.json";
  if (!write_atomic(manifest_path, manifest.dump(2) + "\n")) {
    std::cerr << "error: cannot write '" << manifest_path << "'\n";
    return kExitIo;
  }
  return kExitOk;
}

int cmd_validate(const LoadedConfig& config, bool for_simulation) {
  const underlay::Use use =
      for_simulation ? underlay::Use::monte_carlo : underlay::Use::analytic;
  const int rc = require_valid(config.scenario, use);
  if (rc == kExitOk) std::cout << "ok\n";
  return rc;
}

int cmd_curve(const LoadedConfig& config, const std::string& tier_name,
              double d_min, double d_max, int steps,
              const std::string& out_path) {
  if (!(d_max >= d_min) || steps < 1) {
    std::cerr << "error: need d_max >= d_min and steps >= 1\n";
    return kExitValidation;
  }
  if (int rc = require_valid(config.scenario, underlay::Use::analytic); rc)
    return rc;

  const underlay::Tier tier = tier_name == "secondary"
                                  ? underlay::Tier::secondary
                                  : underlay::Tier::primary;
  std::string csv = "d,h_analytic\n";
  for (double d : linspace(d_min, d_max, steps)) {
    double h;
    try {
      h = underlay::connection_probability({tier, d}, config.scenario);
    } catch (const std::exception& e) {
      std::cerr << "error at d = " << fmt(d) << ": " << e.what() << "\n";
      return kExitValidation;
    }
    csv += fmt(d);
    csv += ',';
    csv += fmt(h);
    csv += '\n';
  }

  json manifest = base_manifest("curve", config);
  manifest["args"] = {{"tier", tier_name},
                      {"d_min", d_min},
                      {"d_max", d_max},
                      {"steps", steps}};
  return deliver(out_path, csv, std::move(manifest));
}

int cmd_verify(const LoadedConfig& config, std::vector<double> eta_list,
               std::vector<double> d_list, std::int64_t trials,
               std::uint64_t seed, int threads, double corrupt_offset,
               const std::string& out_path) {
  if (trials < 1000) {
    std::cerr << "error: verification needs at least 1000 trials\n";
    return kExitValidation;
  }
  if (eta_list.empty()) eta_list = {4.0, 4.5, 5.0, 6.0};
  if (d_list.empty()) d_list = linspace(0.0, 0.8, 16);

  std::string csv = "eta,d,h_analytic,h_mc,ci95,pass\n";
  bool all_pass = true;
  std::uint64_t stream = 0;
  for (double eta : eta_list) {
    underlay::Scenario sc = config.scenario;
    sc.channel.eta = eta;
    if (int rc = require_valid(sc, underlay::Use::analytic); rc) return rc;
    for (double d : d_list) {
      const underlay::LinkQuery link{underlay::Tier::primary, d};
      const double analytic =
          underlay::connection_probability(link, sc) + corrupt_offset;
      const underlay::Estimate mc = underlay::estimate_connection_probability(
          link, sc, trials, underlay::RngSpec{seed, stream++}, threads);
      const double tolerance = std::max(0.01, 3.0 * mc.ci95_halfwidth);
      const bool pass = std::abs(mc.mean - analytic) <= tolerance;
      all_pass = all_pass && pass;
      csv += fmt(eta);
      csv += ',';
      csv += fmt(d);
      csv += ',';
      csv += fmt(analytic);
      csv += ',';
      csv += fmt(mc.mean);
      csv += ',';
      csv += fmt(mc.ci95_halfwidth);
      csv += ',';
      csv += pass ? '1' : '0';
      csv += '\n';
    }
  }

  json manifest = base_manifest("verify", config);
  manifest["args"] = {{"eta_list", eta_list},
                      {"d_list", d_list},
                      {"trials", trials}};
  manifest["seed"] = seed;
  if (corrupt_offset != 0.0) manifest["args"]["corrupt"] = corrupt_offset;
  if (int rc = deliver(out_path, csv, std::move(manifest)); rc) return rc;
  if (!all_pass) {
    std::cerr << "verification failed: estimate disagrees with closed form\n";
    return kExitVerification;
  }
  return kExitOk;
}

int cmd_optimize(const LoadedConfig& config, double distance,
                 std::optional<double> qos_override,
                 const std::string& out_path) {
  underlay::Scenario sc = config.scenario;
  if (qos_override) sc.qos.min_connection_prob = *qos_override;
  if (int rc = require_valid(sc, underlay::Use::analytic); rc) return rc;

  underlay::OptimalStrategy best;
  try {
    best = underlay::solve(distance, sc);
  } catch (const underlay::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  }

  std::string csv =
      "d,qos,power,access_prob,objective,constraint_value,boundary_active\n";
  csv += fmt(distance);
  csv += ',';
  csv += fmt(sc.qos.min_connection_prob);
  csv += ',';
  csv += fmt(best.strategy.power);
  csv += ',';
  csv += fmt(best.strategy.access_prob);
  csv += ',';
  csv += fmt(best.objective);
  csv += ',';
  csv += fmt(best.constraint_value);
  csv += ',';
  csv += best.boundary_active ? '1' : '0';
  csv += '\n';

  json manifest = base_manifest("optimize", config);
  manifest["args"] = {{"distance", distance},
                      {"qos", sc.qos.min_connection_prob}};
  return deliver(out_path, csv, std::move(manifest));
}

int cmd_experiment(const LoadedConfig& config, std::vector<std::int64_t> pairs,
                   bool poisson_counts, double window_side,
                   std::int64_t blocks, std::uint64_t seed, int threads,
                   bool no_cross_tier, const std::string& out_dir) {
  underlay::Scenario sc = config.scenario;
  if (no_cross_tier) {
    sc.weights.ab = 0.0;
    sc.weights.ba = 0.0;
  }
  if (int rc = require_valid(sc, underlay::Use::analytic); rc) return rc;
  if (!(window_side > 0.0)) {
    std::cerr << "error: window side must be positive\n";
    return kExitValidation;
  }

  const underlay::SimWindow window =
      underlay::SimWindow::square(window_side / 2.0);
  std::optional<underlay::PairCounts> counts;
  if (!poisson_counts) {
    counts = underlay::PairCounts{pairs.at(0), pairs.at(1)};
  }

  const underlay::Deployment deployment =
      underlay::deploy(sc, window, counts, {seed, kDeployStream});
  const std::vector<underlay::StrategyRow> strategies =
      underlay::optimize_all(deployment, sc);
  const underlay::SuccessStats stats = underlay::compare_cross_tier(
      deployment, strategies, sc, blocks, {seed, kBlocksStream}, threads);
  const underlay::ExperimentSummary summary =
      underlay::summarize(stats, strategies);

  std::ostringstream pairs_csv;
  underlay::write_pairs_csv(pairs_csv, deployment, strategies, sc);
  std::ostringstream success_csv;
  underlay::write_success_csv(success_csv, stats);
  std::ostringstream summary_csv;
  underlay::write_summary_csv(summary_csv, summary);

  json manifest = base_manifest("experiment", config);
  manifest["seed"] = seed;
  manifest["blocks"] = blocks;
  manifest["args"] = {{"window_side", window_side},
                      {"no_cross_tier", no_cross_tier}};
  if (poisson_counts) {
    manifest["args"]["pair_counts"] = "poisson";
  } else {
    manifest["args"]["pair_counts"] = pairs;
  }
  manifest["out"] = out_dir;
  manifest["outputs"] =
      json::array({"pairs.csv", "success.csv", "summary.csv"});

  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const bool ok = write_atomic(dir / "pairs.csv", pairs_csv.str()) &&
                  write_atomic(dir / "success.csv", success_csv.str()) &&
                  write_atomic(dir / "summary.csv", summary_csv.str()) &&
                  write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  if (!ok) {
    std::cerr << "error: cannot write outputs under '" << out_dir << "'\n";
    return kExitIo;
  }

  std::cout << "pairs: " << deployment.primary.size() << " primary, "
            << deployment.secondary.size() << " secondary ("
            << summary.feasible_secondary << " feasible)\n"
            << "mean primary rate: " << fmt(summary.mean_primary_rate_on)
            << " with cross-tier, " << fmt(summary.mean_primary_rate_off)
            << " without (degradation "
            << fmt(summary.primary_degradation) << ")\n"
            << "mean secondary rate: " << fmt(summary.mean_secondary_rate_on)
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-tier interference network analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  int threads = 0;
  std::optional<double> eta_override;

  auto add_common = [&](CLI::App* cmd, bool with_out = true) {
    cmd->add_option("config", config_path, "scenario config file")
        ->required();
    cmd->add_option("--eta", eta_override,
                    "override channel.eta from the config");
    if (with_out) {
      cmd->add_option("--out", out_path, "output file (default: stdout)");
    }
  };

  CLI::App* validate = app.add_subcommand(
      "validate", "check a config against the model constraints");
  bool for_simulation = false;
  add_common(validate, false);
  validate->add_flag("--for-simulation", for_simulation,
                     "validate for Monte Carlo use (admits eta = 2)");

  CLI::App* curve = app.add_subcommand(
      "curve", "analytic connection probability over a distance grid");
  std::string tier_name = "primary";
  double d_min = 0.0;
  double d_max = 0.8;
  int steps = 16;
  add_common(curve);
  curve->add_option("--tier", tier_name, "primary or secondary")
      ->check(CLI::IsMember({"primary", "secondary"}));
  curve->add_option("--d-min", d_min, "smallest distance");
  curve->add_option("--d-max", d_max, "largest distance");
  curve->add_option("--steps", steps, "grid points");

  CLI::App* verify = app.add_subcommand(
      "verify", "Monte Carlo check of the closed forms over an eta x d grid");
  std::vector<double> eta_list;
  std::vector<double> d_list;
  std::int64_t trials = 100000;
  double corrupt_offset = 0.0;
  add_common(verify);
  verify->add_option("--eta-list", eta_list, "eta values (default 4 4.5 5 6)")
      ->delimiter(',');
  verify->add_option("--d-list", d_list,
                     "distances (default 16 points over [0, 0.8])")
      ->delimiter(',');
  verify->add_option("--trials", trials, "Monte Carlo trials per point");
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--threads", threads, "worker threads (0 = hardware)");
  verify->add_option("--corrupt-analytic", corrupt_offset, "")->group("");

  CLI::App* optimize = app.add_subcommand(
      "optimize", "best secondary strategy for one link distance");
  double distance = 0.0;
  std::optional<double> qos_override;
  add_common(optimize);
  optimize->add_option("--distance", distance, "secondary link distance")
      ->required();
  optimize->add_option("--qos", qos_override,
                       "override qos.min_connection_prob");

  CLI::App* experiment = app.add_subcommand(
      "experiment", "deploy, plan and simulate resource blocks");
  std::vector<std::int64_t> pairs = {20, 20};
  bool poisson_counts = false;
  double window_side = 10.0;
  std::int64_t blocks = 100000;
  bool no_cross_tier = false;
  std::string out_dir;
  experiment->add_option("config", config_path, "scenario config file")
      ->required();
  experiment->add_option("--eta", eta_override,
                         "override channel.eta from the config");
  experiment->add_option("--pairs", pairs, "primary and secondary pair counts")
      ->expected(2);
  experiment->add_flag("--ppp", poisson_counts,
                       "draw pair counts from the tier densities");
  experiment->add_option("--window-side", window_side,
                         "side length of the square domain");
  experiment->add_option("--blocks", blocks, "resource blocks to simulate");
  experiment->add_option("--seed", seed, "random seed");
  experiment->add_option("--threads", threads, "worker threads (0 = hardware)");
  experiment->add_flag("--no-cross-tier", no_cross_tier,
                       "zero both cross-tier interference weights");
  experiment->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  LoadedConfig config;
  std::string error;
  if (int rc = load_config(config_path, eta_override, config, error); rc) {
    std::cerr << "error: " << error << "\n";
    return rc;
  }

  try {
    if (app.got_subcommand(validate)) {
      return cmd_validate(config, for_simulation);
    }
    if (app.got_subcommand(curve)) {
      return cmd_curve(config, tier_name, d_min, d_max, steps, out_path);
    }
    if (app.got_subcommand(verify)) {
      return cmd_verify(config, eta_list, d_list, trials, seed, threads,
                        corrupt_offset, out_path);
    }
    if (app.got_subcommand(optimize)) {
      return cmd_optimize(config, distance, qos_override, out_path);
    }
    if (app.got_subcommand(experiment)) {
      return cmd_experiment(config, pairs, poisson_counts, window_side,
                            blocks, seed, threads, no_cross_tier, out_dir);
    }
  } catch (const underlay::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
