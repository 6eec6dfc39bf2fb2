#include <doctest.h>

#include <random>

#include "alexkit/kernels.hpp"
#include "alexkit/models.hpp"
#include "alexkit/parallel.hpp"

using namespace alexkit;

namespace {

std::vector<PointId> iota_ids(std::size_t n, std::size_t stride = 1) {
  std::vector<PointId> v;
  for (std::size_t i = 0; i < n; i += stride) v.push_back(static_cast<PointId>(i));
  return v;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("link graph matches a brute-force edge list") {
    const auto sq = models::square(1.0, 0.1);
    const auto ids = iota_ids(sq.space->size());
    const auto g = kernels::build_link_graph(*sq.space, ids, 0.15);
    REQUIRE(g.size() == ids.size());
    std::size_t edges = 0;
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = 0; j < ids.size(); ++j)
        if (i != j && sq.space->dist(ids[i], ids[j]) <= 0.15) ++edges;
    CHECK(g.targets.size() == edges);
  }

  TEST_CASE("serial and OpenMP all-pairs geodesics agree bit for bit") {
    const auto sq = models::square(1.0, 0.02, {.interior = false});
    const auto& b = sq.space->subset("boundary").indices;
    const auto g = kernels::build_link_graph(*sq.space, b, 0.06);
    for (const int t : {1, 2, 4}) {
      parallel::set_threads(t);
      CHECK(kernels::omp::all_pairs_geodesic(g) == kernels::serial::all_pairs_geodesic(g));
    }
    parallel::set_threads(0);
  }

  TEST_CASE("serial and OpenMP nearest agree bit for bit") {
    const auto sq = models::square(1.0, 0.02);
    const auto queries = iota_ids(sq.space->size(), 3);
    const auto& targets = sq.space->subset("boundary").indices;
    const auto s = kernels::serial::nearest(*sq.space, queries, targets);
    for (const int t : {1, 3}) {
      parallel::set_threads(t);
      const auto o = kernels::omp::nearest(*sq.space, queries, targets);
      CHECK(o.distance == s.distance);
      CHECK(o.nearest == s.nearest);
    }
    parallel::set_threads(0);
    // lowest id among minimizers
    for (std::size_t i = 0; i < queries.size(); ++i)
      for (const PointId t : targets)
        if (sq.space->dist(queries[i], t) == s.distance[i]) {
          CHECK(s.nearest[i] <= t);
          break;
        }
  }

  TEST_CASE("dijkstra cutoff and parents") {
    const auto seg = models::segment(1.0, 0.1);
    const auto ids = iota_ids(seg.space->size());
    const auto g = kernels::build_link_graph(*seg.space, ids, 0.15);
    std::vector<double> d;
    std::vector<std::int32_t> parent;
    kernels::dijkstra(g, 0, 0.45, d, &parent);
    CHECK(d[4] == doctest::Approx(0.4));
    CHECK(std::isinf(d[5]));
    CHECK(parent[0] == -1);
    CHECK(parent[3] == 2);
  }
}
