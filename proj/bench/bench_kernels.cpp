// OpenMP kernels against their serial references.
#include <benchmark/benchmark.h>

#include <vector>

#include "ocshuffle/appendix.hpp"
#include "ocshuffle/exact.hpp"
#include "ocshuffle/montecarlo.hpp"

using namespace ocs;

namespace {

std::vector<double> ramp(std::size_t size) {
  std::vector<double> v(size);
  for (std::size_t x = 0; x < size; ++x) v[x] = 1.0 / static_cast<double>(x + 1);
  return v;
}

void BM_SingleCardApply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SingleCardKernel k(ShuffleParams(n, n / 2 + 1));
  const auto v = ramp(n);
  std::vector<double> out;
  for (auto _ : state) {
    k.apply(v, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_SingleCardApplySerial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SingleCardKernel k(ShuffleParams(n, n / 2 + 1));
  const auto v = ramp(n);
  std::vector<double> out;
  for (auto _ : state) {
    k.apply_serial(v, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_FullDeckStep(benchmark::State& state) {
  const ShuffleParams p(static_cast<int>(state.range(0)), 4);
  const auto v = ramp(factorial(p.n()));
  std::vector<double> out;
  for (auto _ : state) {
    full_deck_step(p, v, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_FullDeckStepSerial(benchmark::State& state) {
  const ShuffleParams p(static_cast<int>(state.range(0)), 4);
  const auto v = ramp(factorial(p.n()));
  std::vector<double> out;
  for (auto _ : state) {
    full_deck_step_serial(p, v, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_CollisionTrials(benchmark::State& state) {
  const ShuffleParams p(400, 200);
  TrialBudget b;
  b.max_trials = 20000;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_l1_collision(p, {}, b, 1).successes);
}

void BM_CollisionTrialsSerial(benchmark::State& state) {
  const ShuffleParams p(400, 200);
  TrialBudget b;
  b.max_trials = 20000;
  b.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_l1_collision(p, {}, b, 1).successes);
}

void BM_RwBounds(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(appendix_rw_bounds_check(static_cast<int>(state.range(0))).pass());
}

void BM_RwBoundsSerial(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(appendix_rw_bounds_check_serial(static_cast<int>(state.range(0))).pass());
}

}  // namespace

BENCHMARK(BM_SingleCardApply)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_SingleCardApplySerial)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_FullDeckStep)->Arg(7)->Arg(8);
BENCHMARK(BM_FullDeckStepSerial)->Arg(7)->Arg(8);
BENCHMARK(BM_CollisionTrials)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CollisionTrialsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RwBounds)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RwBoundsSerial)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
