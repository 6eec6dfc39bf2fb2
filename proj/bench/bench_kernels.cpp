// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <map>

#include "alexkit/kernels.hpp"
#include "alexkit/models.hpp"

using namespace alexkit;

namespace {

Subset boundary(double h) {
  static std::map<double, models::Model> cache;
  auto it = cache.find(h);
  if (it == cache.end()) it = cache.emplace(h, models::square(1.0, h)).first;
  return Subset::named(it->second.space, "boundary");
}

double pitch(const benchmark::State& s) { return 1.0 / static_cast<double>(s.range(0)); }

void BM_geodesic_serial(benchmark::State& state) {
  const Subset e = boundary(pitch(state));
  const LinkGraph& g = e.link_graph();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::all_pairs_geodesic(g));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}

void BM_geodesic_omp(benchmark::State& state) {
  const Subset e = boundary(pitch(state));
  const LinkGraph& g = e.link_graph();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::all_pairs_geodesic(g));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}

template <bool Parallel>
void nearest_bench(benchmark::State& state) {
  const Subset e = boundary(pitch(state));
  const Space& s = e.space();
  std::vector<PointId> queries;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!e.contains(static_cast<PointId>(i))) queries.push_back(static_cast<PointId>(i));
  for (auto _ : state) {
    if constexpr (Parallel) benchmark::DoNotOptimize(kernels::omp::nearest(s, queries, e.indices()));
    else benchmark::DoNotOptimize(kernels::serial::nearest(s, queries, e.indices()));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queries.size()));
}

void BM_nearest_serial(benchmark::State& state) { nearest_bench<false>(state); }
void BM_nearest_omp(benchmark::State& state) { nearest_bench<true>(state); }

}  // namespace

BENCHMARK(BM_geodesic_serial)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_geodesic_omp)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nearest_serial)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nearest_omp)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
