#include <benchmark/benchmark.h>

#include "conlearn/absorption_cache.hpp"
#include "conlearn/ensemble_analytics.hpp"
#include "conlearn/gossip_sim.hpp"
#include "conlearn/slush_markov.hpp"

using namespace conlearn;

static void BM_Absorption(benchmark::State& state) {
  const SlushParams p{static_cast<int>(state.range(0)), 10, 7};
  for (auto _ : state) benchmark::DoNotOptimize(absorption(p));
}
BENCHMARK(BM_Absorption)->Arg(101)->Arg(501)->Arg(2001)->Unit(benchmark::kMillisecond);

static void BM_AbsorptionOracle(benchmark::State& state) {
  const SlushParams p{static_cast<int>(state.range(0)), 10, 7};
  for (auto _ : state) benchmark::DoNotOptimize(absorption_oracle(p));
}
BENCHMARK(BM_AbsorptionOracle)->Arg(101)->Arg(501)->Unit(benchmark::kMillisecond);

static void BM_ThresholdBisect(benchmark::State& state) {
  ThresholdQuery q;
  q.params = {static_cast<int>(state.range(0)), 10, 7};
  q.q = 0.55;
  for (auto _ : state) {
    clear_absorption_cache();
    benchmark::DoNotOptimize(threshold_bisect(q));
  }
}
BENCHMARK(BM_ThresholdBisect)->Arg(101)->Arg(501)->Unit(benchmark::kMillisecond);

static void BM_RunSlush(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SlushParams p{n, 10, 7};
  const auto nodes = homogeneous_population(n, 0.6);
  const NetworkState start = fixed_start(nodes, n / 2 + 1);
  std::uint64_t r = 0;
  for (auto _ : state) {
    Rng rng = Rng::derive(1, r++);
    benchmark::DoNotOptimize(run_slush(nodes, start, p, {}, rng));
  }
}
BENCHMARK(BM_RunSlush)->Arg(61)->Arg(101)->Arg(501)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
