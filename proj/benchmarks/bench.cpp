#include <benchmark/benchmark.h>

#include "csmon/boundary.hpp"
#include "csmon/estimators.hpp"
#include "csmon/quantiles.hpp"
#include "csmon/rng.hpp"
#include "csmon/sequence.hpp"

using namespace csmon;

static void BM_philox_u64(benchmark::State& state) {
  CounterRng rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_u64());
}
BENCHMARK(BM_philox_u64);

static void BM_gaussian(benchmark::State& state) {
  CounterRng rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_gaussian());
}
BENCHMARK(BM_gaussian);

static void BM_welford_update(benchmark::State& state) {
  CounterRng rng(1, 0);
  StreamState s(100);
  for (auto _ : state) {
    s.update(rng.next_gaussian());
    benchmark::DoNotOptimize(s.mean());
  }
}
BENCHMARK(BM_welford_update);

static void BM_bartlett_update(benchmark::State& state) {
  CounterRng rng(1, 0);
  StreamState s(100, 1, VarianceMethod::BartlettLongRun);
  for (auto _ : state) {
    s.update(rng.next_gaussian());
    benchmark::DoNotOptimize(s.variance());
  }
}
BENCHMARK(BM_bartlett_update);

static void BM_monitor_step(benchmark::State& state) {
  // Full per-observation cost: update + interval + one-sided test.
  const auto shape = BoundaryShape::canonical(0.0, 0.25);
  CriticalValue cv;
  cv.sided = Sided::TwoSided;
  cv.value = 1.5;
  CounterRng rng(1, 0);
  StreamState s(100);
  s.update(rng.next_gaussian());
  s.update(rng.next_gaussian());
  for (auto _ : state) {
    s.update(rng.next_gaussian());
    benchmark::DoNotOptimize(interval(s, shape, cv));
  }
}
BENCHMARK(BM_monitor_step);

static void BM_bridge_paths(benchmark::State& state) {
  const auto grid =
      PathGrid::with_endpoint_clusters(static_cast<int>(state.range(0)));
  std::int64_t paths = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_bridge_sup(0.25, 0.25, grid, 256, 1, Sided::TwoSided, 1));
    paths += 256;
  }
  state.SetItemsProcessed(paths);
}
BENCHMARK(BM_bridge_paths)->Arg(1024)->Arg(8192);

static void BM_boundary_width(benchmark::State& state) {
  const auto shape = BoundaryShape::canonical(0.25, 0.25);
  std::int64_t t = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(boundary_width(shape, 100, t));
    if (++t > 100000) t = 1;
  }
}
BENCHMARK(BM_boundary_width);

BENCHMARK_MAIN();
