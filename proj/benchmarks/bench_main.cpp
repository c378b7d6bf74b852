#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "loewner/curve.hpp"
#include "loewner/driver.hpp"
#include "loewner/montecarlo.hpp"
#include "loewner/rng.hpp"
#include "loewner/zipper.hpp"

namespace {

loewner::Driver smooth_driver(std::size_t n) {
  std::vector<double> v(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    v[k] = std::sin(3.0 * t) + t;
  }
  return loewner::make_driver(std::move(v), 1.0);
}

void BM_Trace(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto driver = smooth_driver(n);
  for (auto _ : state) benchmark::DoNotOptimize(loewner::trace(driver));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Trace)->RangeMultiplier(2)->Range(128, 2048)->Complexity(benchmark::oNSquared);

void BM_Zip(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto curve = loewner::trace(smooth_driver(n));
  for (auto _ : state) benchmark::DoNotOptimize(loewner::zip_curve(curve));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Zip)->RangeMultiplier(2)->Range(128, 2048)->Complexity(benchmark::oNSquared);

void BM_BrownianReplica(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t i = 0;
  for (auto _ : state) {
    const auto driver = loewner::sample_brownian_driver(2.0, 1.0, n, loewner::mix_seed(1, i++));
    benchmark::DoNotOptimize(loewner::trace(driver));
  }
}
BENCHMARK(BM_BrownianReplica)->Arg(256)->Arg(2048);

void BM_EventEstimate(benchmark::State& state) {
  loewner::mc::RunOptions options;
  options.replicas = 64;
  options.steps = 256;
  const loewner::mc::Event event = loewner::mc::DriverSupEvent{};
  for (auto _ : state) benchmark::DoNotOptimize(loewner::mc::estimate_event(event, 1.0, options));
}
BENCHMARK(BM_EventEstimate);

}  // namespace

BENCHMARK_MAIN();
