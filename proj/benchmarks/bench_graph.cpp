#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "sdflow/graph_pde.hpp"
#include "sdflow/periodic_solver.hpp"

namespace {

sdflow::GraphField field(std::size_t n) {
  return sdflow::GraphField::from_function(2 * std::numbers::pi, 0.5, n,
                                           [](double x) { return 0.2 * std::sin(x) + 0.05 * std::cos(3 * x); });
}

void BM_Operator(benchmark::State& state) {
  const auto f = field(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sdflow::surface_diffusion_operator(f));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Operator)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oN);

void BM_BiharmonicSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  sdflow::PeriodicBiharmonicSolver solver(n);
  std::vector<double> x(n, 1.0);
  for (auto _ : state) {
    solver.solve(x, 1e-3, 0.01);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BiharmonicSolve)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNLogN);

void BM_Step(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto scheme = state.range(1) == 0 ? sdflow::Scheme::SemiImplicit : sdflow::Scheme::ExplicitRK;
  auto f = field(n);
  const double dt = scheme == sdflow::Scheme::ExplicitRK ? sdflow::explicit_stability_bound(f.spacing(), 0.9) : 1e-3;
  sdflow::GraphStepper stepper(n);
  for (auto _ : state) f = stepper.step(f, dt, scheme);
}
BENCHMARK(BM_Step)->Args({128, 0})->Args({128, 1})->Args({1024, 0})->Args({1024, 1});

}  // namespace
