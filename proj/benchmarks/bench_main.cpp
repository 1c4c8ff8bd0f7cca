#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "mcfob/flow.hpp"
#include "mcfob/grid.hpp"
#include "mcfob/obstacles.hpp"

namespace {

using namespace mcfob;

ScalarField wave(const PeriodicGrid& g) {
  const double k = 2.0 * std::numbers::pi;
  return ScalarField::sample(g, [&](const GridPoint& p) {
    return 0.3 * std::sin(k * p[0]) * (g.dim() == 2 ? std::sin(k * p[1]) : 1.0);
  });
}

void BM_McfOperator(benchmark::State& state) {
  PeriodicGrid g(static_cast<int>(state.range(0)), 1.0, static_cast<int>(state.range(1)));
  const auto f = wave(g);
  for (auto _ : state) benchmark::DoNotOptimize(mcf_operator(f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_McfOperator)->Args({1, 1024})->Args({2, 64})->Args({2, 128})->Args({2, 256});

void BM_Step(benchmark::State& state) {
  PeriodicGrid g(static_cast<int>(state.range(0)), 1.0, static_cast<int>(state.range(1)));
  const Scheme scheme = state.range(2) ? Scheme::projected : Scheme::penalized;
  const auto u0 = wave(g);
  auto obs = make_obstacles(g, u0 + (-0.1), u0 + 0.45);
  FlowConfig cfg;
  cfg.scheme = scheme;
  cfg.pen = {4.0 * g.spacing(), obs.curvature_bound};
  const FlowState s{u0 + 0.2, 0.0, 0};
  const double dt = cfl_dt(s, obs, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(step(s, obs, cfg, dt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_Step)
    ->Args({1, 1024, 0})
    ->Args({1, 1024, 1})
    ->Args({2, 128, 0})
    ->Args({2, 128, 1});

void BM_GraphArea(benchmark::State& state) {
  PeriodicGrid g(2, 1.0, static_cast<int>(state.range(0)));
  const auto f = wave(g);
  for (auto _ : state) benchmark::DoNotOptimize(graph_area(f));
}
BENCHMARK(BM_GraphArea)->Arg(128)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
