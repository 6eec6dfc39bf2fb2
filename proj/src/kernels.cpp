#include "alexkit/kernels.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <utility>

#include "alexkit/parallel.hpp"

namespace alexkit::kernels {

void dijkstra(const LinkGraph& g, std::size_t source, double cutoff, std::vector<double>& dist,
              std::vector<std::int32_t>* parent) {
  const std::size_t n = g.size();
  dist.assign(n, kInf);
  if (parent != nullptr) parent->assign(n, -1);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, static_cast<std::uint32_t>(source));
  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[u]) continue;
    for (std::uint32_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
      const std::uint32_t v = g.targets[e];
      const double nd = du + g.weights[e];
      if (nd > cutoff) continue;
      if (nd < dist[v]) {
        dist[v] = nd;
        if (parent != nullptr) (*parent)[v] = static_cast<std::int32_t>(u);
        heap.emplace(nd, v);
      }
    }
  }
}

LinkGraph build_link_graph(const Space& space, std::span<const PointId> ids, double radius) {
  const std::size_t n = ids.size();
  std::vector<std::int32_t> local(space.size(), -1);
  for (std::size_t i = 0; i < n; ++i) local[static_cast<std::size_t>(ids[i])] = static_cast<std::int32_t>(i);

  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n);
  parallel::for_each_index(n, [&](std::size_t i) {
    auto& row = adj[i];
    space.for_each_within(ids[i], radius, [&](PointId q, double d) {
      const std::int32_t j = local[static_cast<std::size_t>(q)];
      if (j >= 0 && static_cast<std::size_t>(j) != i) row.emplace_back(static_cast<std::uint32_t>(j), d);
    });
    std::sort(row.begin(), row.end());
  });

  LinkGraph g;
  g.offsets.resize(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets[i + 1] = g.offsets[i] + static_cast<std::uint32_t>(adj[i].size());
  g.targets.reserve(g.offsets[n]);
  g.weights.reserve(g.offsets[n]);
  for (const auto& row : adj)
    for (const auto& [j, w] : row) {
      g.targets.push_back(j);
      g.weights.push_back(w);
    }
  return g;
}

namespace {

template <class ForEach>
std::vector<double> all_pairs_impl(const LinkGraph& g, ForEach&& for_each) {
  const std::size_t n = g.size();
  std::vector<double> out(n * n, kInf);
  for_each(n, [&](std::size_t s) {
    std::vector<double> row;
    dijkstra(g, s, kInf, row);
    std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(s * n));
  });
  // Symmetrize with the smaller value; the two directions agree up to summation order.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::min(out[i * n + j], out[j * n + i]);
      out[i * n + j] = v;
      out[j * n + i] = v;
    }
  return out;
}

template <class ForEach>
NearestResult nearest_impl(const Space& space, std::span<const PointId> queries, std::span<const PointId> targets,
                           ForEach&& for_each) {
  NearestResult r;
  r.distance.assign(queries.size(), kInf);
  r.nearest.assign(queries.size(), -1);
  for_each(queries.size(), [&](std::size_t i) {
    double best = kInf;
    PointId arg = -1;
    for (const PointId t : targets) {
      const double d = space.dist(queries[i], t);
      if (d < best || (d == best && t < arg)) {
        best = d;
        arg = t;
      }
    }
    r.distance[i] = best;
    r.nearest[i] = arg;
  });
  return r;
}

}  // namespace

namespace serial {
std::vector<double> all_pairs_geodesic(const LinkGraph& g) {
  return all_pairs_impl(g, [](std::size_t n, auto&& body) { parallel::for_each_index_serial(n, body); });
}
NearestResult nearest(const Space& space, std::span<const PointId> queries, std::span<const PointId> targets) {
  return nearest_impl(space, queries, targets,
                      [](std::size_t n, auto&& body) { parallel::for_each_index_serial(n, body); });
}
}  // namespace serial

namespace omp {
std::vector<double> all_pairs_geodesic(const LinkGraph& g) {
  return all_pairs_impl(g, [](std::size_t n, auto&& body) { parallel::for_each_index(n, body); });
}
NearestResult nearest(const Space& space, std::span<const PointId> queries, std::span<const PointId> targets) {
  return nearest_impl(space, queries, targets, [](std::size_t n, auto&& body) { parallel::for_each_index(n, body); });
}
}  // namespace omp

}  // namespace alexkit::kernels
