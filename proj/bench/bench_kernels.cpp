// Serial reference kernels against their OpenMP versions.
//
//   ./bench_kernels --benchmark_filter=Draws
//
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "ilab/catalog.hpp"
#include "ilab/kernels.hpp"
#include "ilab/montecarlo_oracle.hpp"
#include "ilab/rubin_audit.hpp"

using namespace ilab;

namespace {

std::vector<std::uint64_t> draw_thresholds() {
  const auto b = catalog_model("srs");
  return inverse_cdf_thresholds(build_joint(*b.model, 1, 0));
}

void BM_CountDrawsSerial(benchmark::State& state) {
  const auto thresholds = draw_thresholds();
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::count_draws_serial(thresholds, 42, static_cast<std::uint64_t>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CountDrawsOmp(benchmark::State& state) {
  const auto thresholds = draw_thresholds();
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::count_draws_omp(thresholds, 42, static_cast<std::uint64_t>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct LawFixture {
  BuiltModel built = catalog_model("stratified");
  Family family = family_of(built.model);
  TargetValues tv = evaluate_target(builtin_target("signal"), family);
};

void BM_ObservedLawsSerial(benchmark::State& state) {
  const LawFixture f;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::observed_laws_serial(f.family, f.tv, f.built.scheme));
}

void BM_ObservedLawsOmp(benchmark::State& state) {
  const LawFixture f;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::observed_laws_omp(f.family, f.tv, f.built.scheme));
}

void BM_RubinSweepSerial(benchmark::State& state) {
  const auto jobs = rubin_sweep_family();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::rubin_sweep_serial(jobs));
}

void BM_RubinSweepOmp(benchmark::State& state) {
  const auto jobs = rubin_sweep_family();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::rubin_sweep_omp(jobs));
}

}  // namespace

BENCHMARK(BM_CountDrawsSerial)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountDrawsOmp)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ObservedLawsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ObservedLawsOmp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RubinSweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RubinSweepOmp)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
