#include <benchmark/benchmark.h>

#include "sdflow/certificates.hpp"
#include "sdflow/soliton.hpp"

namespace {

void BM_ShootRandom(benchmark::State& state) {
  const sdflow::SolitonKind kinds[] = {sdflow::Steady{}, sdflow::SelfSimilar{}, sdflow::TravellingWave{1, 1}};
  const auto& kind = kinds[state.range(0)];
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto r = sdflow::shoot_bidirectional(kind, sdflow::sample_initial_state(seed++ % 100), 200.0);
    benchmark::DoNotOptimize(r.verdict);
  }
}
BENCHMARK(BM_ShootRandom)->Arg(0)->Arg(1)->Arg(2);

void BM_ShootLine(benchmark::State& state) {
  for (auto _ : state) {
    auto r = sdflow::shoot_bidirectional(sdflow::SelfSimilar{}, sdflow::linear_state(1.0), 100.0);
    benchmark::DoNotOptimize(r.verdict);
  }
}
BENCHMARK(BM_ShootLine)->Unit(benchmark::kMillisecond);

void BM_QConvexity(benchmark::State& state) {
  sdflow::IntegratorOptions o;
  o.rtol = o.atol = 1e-12;
  o.sample_spacing = 1e-3;
  const auto t =
      sdflow::shoot_bidirectional(sdflow::SelfSimilar{}, sdflow::sample_initial_state(3), 200.0, o).merged_trajectory();
  for (auto _ : state) {
    auto r = sdflow::convexity_residual_q(t, {});
    benchmark::DoNotOptimize(r.max_residual);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.samples.size()));
}
BENCHMARK(BM_QConvexity);

}  // namespace
