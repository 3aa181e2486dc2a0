#include <benchmark/benchmark.h>

#include <memory>

#include "rwres/engine.hpp"
#include "rwres/graph.hpp"
#include "rwres/theory.hpp"

namespace {

void BM_IrwinHallCdf(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  double x = 0.0;
  for (auto _ : state) {
    x += 1e-6;
    benchmark::DoNotOptimize(rwres::theory::irwin_hall_cdf(m, m * 0.3 + x));
  }
}
BENCHMARK(BM_IrwinHallCdf)->Arg(9)->Arg(20)->Arg(64);

void BM_GenerateGraph(benchmark::State& state) {
  rwres::GraphSpec spec;
  spec.family = static_cast<rwres::GraphFamily>(state.range(0));
  spec.n = 1000;
  spec.edge_prob = 0.01;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    spec.seed = seed++;
    benchmark::DoNotOptimize(rwres::generate(spec));
  }
}
BENCHMARK(BM_GenerateGraph)
    ->Arg(static_cast<int>(rwres::GraphFamily::random_regular))
    ->Arg(static_cast<int>(rwres::GraphFamily::erdos_renyi))
    ->Arg(static_cast<int>(rwres::GraphFamily::power_law));

void BM_EngineStep(benchmark::State& state) {
  rwres::GraphSpec spec;
  spec.n = static_cast<int>(state.range(0));
  auto graph = std::make_shared<const rwres::Graph>(rwres::generate(spec));
  rwres::PolicyConfig policy;
  policy.kind = rwres::PolicyKind::decafork;
  policy.gamma = 2.0;
  rwres::Simulation start(graph, policy, {}, {});
  start.warmup();
  // Batches from a fixed post-warmup state keep the walk count near z0.
  constexpr int kSteps = 1000;
  for (auto _ : state) {
    state.PauseTiming();
    rwres::Simulation sim = start;
    state.ResumeTiming();
    for (int i = 0; i < kSteps; ++i) benchmark::DoNotOptimize(sim.step());
  }
  state.SetItemsProcessed(state.iterations() * kSteps);
}
BENCHMARK(BM_EngineStep)->Arg(100)->Arg(1000);

void BM_ReactionTime(benchmark::State& state) {
  rwres::theory::TheoryParams p;
  p.lambda_r = 0.01;
  p.mu_h = 0.02;
  for (auto _ : state) benchmark::DoNotOptimize(rwres::theory::reaction_time_bound(5, 0, 5, p, 0.01));
}
BENCHMARK(BM_ReactionTime);

}  // namespace

BENCHMARK_MAIN();
