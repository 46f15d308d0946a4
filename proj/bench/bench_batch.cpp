// Serial reference loop vs the OpenMP kernels on the same batches.
#include <benchmark/benchmark.h>

#include "shiryaev/analysis.hpp"
#include "shiryaev/simulator.hpp"

namespace {

using namespace shiryaev;

void BM_RunBatch(benchmark::State& state, Execution execution) {
  const GaussianShiftModel model(0.3);
  const GeometricPrior prior(0.05);
  const MonteCarloConfig config{state.range(0), 5000, 2019, ChangeMode::no_change()};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_batch(model, prior, config, nullptr, execution));
  }
  state.SetItemsProcessed(state.iterations() * config.trials * config.horizon);
}

void BM_AnalyseBatch(benchmark::State& state, Execution execution) {
  const GaussianShiftModel model(0.23);
  const GeometricPrior prior(0.05);
  const MonteCarloConfig config{state.range(0), 5000, 2019, ChangeMode::no_change()};
  AnalysisOptions options;
  options.trap = TrapLevels{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyse_batch(model, prior, config, nullptr, options, execution));
  }
  state.SetItemsProcessed(state.iterations() * config.trials * config.horizon);
}

void BM_Sweep(benchmark::State& state, Execution execution) {
  const GeometricPrior prior(0.05);
  const MonteCarloConfig config{state.range(0), 5000, 2019, ChangeMode::no_change()};
  const auto grid = default_m_grid();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mean_terminal_posterior(grid, gaussian_shift_family(), prior, config, execution));
  }
}

BENCHMARK_CAPTURE(BM_RunBatch, serial, Execution::serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RunBatch, parallel, Execution::parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_AnalyseBatch, serial, Execution::serial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_AnalyseBatch, parallel, Execution::parallel)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Sweep, serial, Execution::serial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Sweep, parallel, Execution::parallel)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
