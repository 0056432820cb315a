// Serial reference against the OpenMP kernels for contour sampling and sweeps.

#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include "blstab/harness.hpp"

using namespace blstab;

namespace {

void sample_contour(benchmark::State& state, Side side, Execution exec) {
  const EvansFunction d(make_layer_params(5.0 / 3.0, 1e-3, 0.4, side));
  const Contour c = semicircle(10.0, static_cast<std::size_t>(state.range(0)), 1e-4);
  const std::span<const Complex> pts(c.points.data(), c.points.size() - 1);
  for (auto _ : state) benchmark::DoNotOptimize(d.sample_path(pts, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(pts.size()));
}

void sweep(benchmark::State& state, Execution exec) {
  spdlog::set_level(spdlog::level::warn);
  SweepConfig c;
  c.side = Side::Inflow;
  c.points = 30;
  c.gamma_list = {5.0 / 3.0};
  c.v0_list = {0.2, 0.4, 0.7};
  c.v_plus_list = {1e-2, 1e-4};
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(c, exec));
  state.SetItemsProcessed(state.iterations() * 6);
}

}  // namespace

BENCHMARK_CAPTURE(sample_contour, inflow_serial, Side::Inflow, Execution::Serial)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sample_contour, inflow_parallel, Side::Inflow, Execution::Parallel)
    ->Arg(60)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK_CAPTURE(sample_contour, outflow_serial, Side::Outflow, Execution::Serial)
    ->Arg(60)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sample_contour, outflow_parallel, Side::Outflow, Execution::Parallel)
    ->Arg(60)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK_CAPTURE(sweep, serial, Execution::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sweep, parallel, Execution::Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
