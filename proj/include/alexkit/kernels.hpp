#pragma once

// Data-parallel kernels. Each kernel has an OpenMP version (namespace omp)
// and a serial reference (namespace serial) that must produce bit-identical
// results; the tests compare them and bench/ times them.

#include <span>
#include <vector>

#include "alexkit/space.hpp"

namespace alexkit::kernels {

/// Single-source shortest paths on a link graph; entries beyond `cutoff` stay +inf.
/// If `parent` is non-null it receives the predecessor of each vertex (-1 for
/// the source and unreachable vertices); ties go to the lower predecessor index.
void dijkstra(const LinkGraph& g, std::size_t source, double cutoff, std::vector<double>& dist,
              std::vector<std::int32_t>* parent = nullptr);

/// Brute-force link graph over `ids`: edge between local i, j iff d <= radius.
LinkGraph build_link_graph(const Space& space, std::span<const PointId> ids, double radius);

/// Minimum distance from every query point to the target set.
struct NearestResult {
  std::vector<double> distance;
  std::vector<PointId> nearest;  ///< lowest id among minimizers
};

namespace serial {
/// All-pairs shortest paths: row-major n x n.
std::vector<double> all_pairs_geodesic(const LinkGraph& g);
NearestResult nearest(const Space& space, std::span<const PointId> queries, std::span<const PointId> targets);
}  // namespace serial

namespace omp {
std::vector<double> all_pairs_geodesic(const LinkGraph& g);
NearestResult nearest(const Space& space, std::span<const PointId> queries, std::span<const PointId> targets);
}  // namespace omp

}  // namespace alexkit::kernels
