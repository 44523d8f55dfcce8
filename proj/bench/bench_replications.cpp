#include <benchmark/benchmark.h>

#include "msnet/bounds.hpp"
#include "msnet/models.hpp"
#include "msnet/stationary.hpp"

namespace {

using namespace msnet;

const TandemModel& tandem() {
  static const TandemModel model(HeavyTailDist::pareto(2.5, 0.3), HeavyTailDist::pareto_with_mean(2.5, 0.25),
                                 ArrivalSpec::deterministic(1.0));
  return model;
}

void stationary(benchmark::State& state, bool serial) {
  const auto count = static_cast<std::size_t>(state.range(0));
  ParallelOptions par{0, serial};
  for (auto _ : state) {
    auto run = run_stationary(tandem(), HorizonPolicy{}, count, 7, par);
    benchmark::DoNotOptimize(run.values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void sandwich(benchmark::State& state, bool serial) {
  const auto count = static_cast<std::size_t>(state.range(0));
  ParallelOptions par{0, serial};
  for (auto _ : state) {
    auto rep = sandwich_suite(tandem(), 4, 16, count, 7, par);
    benchmark::DoNotOptimize(rep.violations);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_StationarySerial(benchmark::State& s) { stationary(s, true); }
void BM_StationaryOpenMP(benchmark::State& s) { stationary(s, false); }
void BM_SandwichSerial(benchmark::State& s) { sandwich(s, true); }
void BM_SandwichOpenMP(benchmark::State& s) { sandwich(s, false); }

}  // namespace

BENCHMARK(BM_StationarySerial)->Arg(1 << 12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StationaryOpenMP)->Arg(1 << 12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SandwichSerial)->Arg(1 << 12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SandwichOpenMP)->Arg(1 << 12)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
