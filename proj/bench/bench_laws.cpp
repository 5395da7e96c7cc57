// Serial reference against the OpenMP trial loop, plus the per-trial kernels
// that dominate a law run.

#include <benchmark/benchmark.h>

#include "ncstat/entropy.hpp"
#include "ncstat/laws.hpp"

using namespace ncstat;

namespace {

GeneratorConfig bench_config(int trials) {
  GeneratorConfig cfg;
  cfg.trials = trials;
  return cfg;
}

void BM_LawsSerial(benchmark::State& state) {
  const GeneratorConfig cfg = bench_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_laws(cfg, Execution::serial));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LawsParallel(benchmark::State& state) {
  const GeneratorConfig cfg = bench_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_laws(cfg, Execution::parallel));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ComposablePair(benchmark::State& state) {
  const GeneratorConfig cfg;
  std::uint64_t i = 0;
  for (auto _ : state) {
    Rng rng = Rng::stream(cfg.seed, i++);
    benchmark::DoNotOptimize(gen_composable_pair(rng, cfg));
  }
}

void BM_Functoriality(benchmark::State& state) {
  const GeneratorConfig cfg;
  const ComposablePair p = gen_composable_pair(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(functoriality_defect(p.inner, p.outer));
}

}  // namespace

BENCHMARK(BM_LawsSerial)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LawsParallel)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ComposablePair)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Functoriality)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
