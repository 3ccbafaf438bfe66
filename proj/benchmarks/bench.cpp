#include <benchmark/benchmark.h>

#include "underlay/analytic.hpp"
#include "underlay/experiment.hpp"
#include "underlay/montecarlo.hpp"
#include "underlay/optimizer.hpp"

namespace {

using namespace underlay;

Scenario reference_scenario(double density) {
  Scenario sc;
  sc.channel = {4.0, 1e-3, 1.0};
  sc.primary = {density, 1.0, 1.0, 1.0};
  sc.secondary = {density, 1.0, 1.0, 1.0};
  sc.weights = {1.0, 1.0, 1.0, 1.0};
  sc.qos = {1.0, 0.5};
  sc.bounds = {0.0, 5.0};
  return sc;
}

void BM_LaplaceExponentClosedForm(benchmark::State& state) {
  const ChannelParams ch{4.0, 1e-3, 0.0};
  const LaplaceArgs args{0.27, 1.0, 0.6, 1.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(laplace_exponent(args, ch));
  }
}
BENCHMARK(BM_LaplaceExponentClosedForm);

void BM_LaplaceExponentQuadrature(benchmark::State& state) {
  const ChannelParams ch{4.0, 1e-3, 0.0};
  const LaplaceArgs args{0.27, 1.0, 0.6, 1.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(laplace_exponent_quadrature(args, ch, 1e-10));
  }
}
BENCHMARK(BM_LaplaceExponentQuadrature);

void BM_ConnectionProbability(benchmark::State& state) {
  const Scenario sc = reference_scenario(1.0);
  const LinkQuery link{Tier::primary, 0.4};
  for (auto _ : state) {
    benchmark::DoNotOptimize(connection_probability(link, sc));
  }
}
BENCHMARK(BM_ConnectionProbability);

void BM_EstimateTrials(benchmark::State& state) {
  const Scenario sc = reference_scenario(1.0);
  const LinkQuery link{Tier::primary,
                       0.1 * static_cast<double>(state.range(0))};
  const SimWindow window = SimWindow::for_link(link, sc);
  const std::int64_t trials = 2000;
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_connection_probability(
        link, sc, trials, window, RngSpec{1, stream++}, 1));
  }
  state.SetItemsProcessed(state.iterations() * trials);
}
BENCHMARK(BM_EstimateTrials)->Arg(1)->Arg(4)->Arg(8);

void BM_Solve(benchmark::State& state) {
  const Scenario sc = reference_scenario(0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(0.3, sc));
  }
}
BENCHMARK(BM_Solve);

void BM_ResourceBlocks(benchmark::State& state) {
  const Scenario sc = reference_scenario(0.2);
  const Deployment dep =
      deploy(sc, SimWindow::square(5.0), PairCounts{20, 20}, RngSpec{3, 1});
  const std::vector<StrategyRow> rows = optimize_all(dep, sc);
  const std::int64_t blocks = state.range(0);
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_resource_blocks(
        dep, rows, sc, blocks, CrossTier::on, RngSpec{4, stream++}, 1));
  }
  state.SetItemsProcessed(state.iterations() * blocks);
}
BENCHMARK(BM_ResourceBlocks)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
