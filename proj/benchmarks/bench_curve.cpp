#include <benchmark/benchmark.h>

#include "sdflow/curve_flow.hpp"

namespace {

void BM_NormalVelocity(benchmark::State& state) {
  const auto c = sdflow::seed_ellipse(2.0, 1.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sdflow::normal_velocity(c));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NormalVelocity)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oN);

void BM_Resample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto c = sdflow::seed_lemniscate(n);
  for (auto _ : state) benchmark::DoNotOptimize(sdflow::resample_uniform(c, n));
}
BENCHMARK(BM_Resample)->Arg(256)->Arg(1024);

void BM_Monitors(benchmark::State& state) {
  const auto c = sdflow::seed_lemniscate(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sdflow::curve_monitors(c));
}
BENCHMARK(BM_Monitors)->Arg(256)->Arg(512);

void BM_FlowCircle(benchmark::State& state) {
  const auto c = sdflow::seed_circle(2.0, 256);
  sdflow::CurveFlowOptions o;
  o.dt = 1e-4;
  o.t_end = 1e-2;
  for (auto _ : state) benchmark::DoNotOptimize(sdflow::flow(c, o).steps);
}
BENCHMARK(BM_FlowCircle)->Unit(benchmark::kMillisecond);

void BM_Clothoid(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sdflow::seed_clothoid(3.0, 512));
}
BENCHMARK(BM_Clothoid);

}  // namespace
