#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace alexkit {

using PointId = std::int32_t;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A marked subset as stored in a space file.
struct NamedSubset {
  std::string name;
  std::vector<PointId> indices;
  bool extremal = false;
};

/// Uniform-grid index over Euclidean coordinates, used to answer ball
/// queries without a full scan.
class GridIndex {
 public:
  GridIndex() = default;
  GridIndex(int dim, std::span<const double> coords, std::size_t n, double cell_hint);

  bool empty() const { return cell_ == 0.0; }

  /// Calls visit(id) for every id whose cell intersects the box of half-width r
  /// around `center`. Returns false if the box is too large to be worth it.
  template <class Visit>
  bool visit_box(std::span<const double> center, double r, Visit&& visit) const;

 private:
  int dim_ = 0;
  double cell_ = 0.0;
  std::vector<double> lo_;
  std::vector<std::int64_t> counts_;
  std::vector<std::uint32_t> start_;
  std::vector<PointId> ids_;
  std::size_t n_ = 0;
};

/// A finite metric space: either a dense distance matrix or the Euclidean
/// metric of stored coordinates.
class Space {
 public:
  Space() = default;

  /// Euclidean metric on `n = coords.size() / dim` points.
  static Space euclidean(std::string name, int dim, std::vector<double> coords, double kappa = 0.0,
                         std::optional<double> resolution = std::nullopt);

  /// Dense metric from a row-major n x n matrix (symmetry is not enforced;
  /// see validate()).
  static Space from_matrix(std::string name, double kappa, std::size_t n, std::vector<double> matrix,
                           std::optional<double> resolution = std::nullopt);

  /// Attaches coordinates to a matrix space. They are provenance only.
  void set_coords(int dim, std::vector<double> coords);

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  double kappa() const { return kappa_; }
  std::optional<double> resolution() const { return resolution_; }
  void set_resolution(std::optional<double> h) { resolution_ = h; }
  double resolution_or(double fallback) const { return resolution_.value_or(fallback); }

  std::size_t size() const { return n_; }
  bool is_euclidean() const { return euclidean_; }
  bool has_coords() const { return dim_ > 0; }
  int dim() const { return dim_; }
  std::span<const double> coord(PointId i) const {
    return {coords_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
  }
  std::span<const double> coords() const { return coords_; }
  std::span<const double> matrix() const { return matrix_; }

  double dist(PointId i, PointId j) const {
    if (!euclidean_) return matrix_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)];
    const double* a = coords_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_);
    const double* b = coords_.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(dim_);
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) {
      const double d = a[k] - b[k];
      s += d * d;
    }
    return std::sqrt(s);
  }

  void check_id(PointId p) const;

  /// { q : d(p, q) < r }, sorted by id. Includes p iff r > 0.
  std::vector<PointId> ball(PointId p, double r) const;

  /// { q : d(p, q) <= r }, sorted by id.
  std::vector<PointId> closed_ball(PointId p, double r) const;

  /// { q : lo < d(p, q) < hi }, sorted by id.
  std::vector<PointId> annulus(PointId p, double lo, double hi) const;

  /// Calls visit(q, d) for every q with d(p, q) <= r, in unspecified order.
  template <class Visit>
  void for_each_within(PointId p, double r, Visit&& visit) const;

  double diameter() const;

  std::vector<NamedSubset>& subsets() { return subsets_; }
  const std::vector<NamedSubset>& subsets() const { return subsets_; }
  const NamedSubset& subset(std::string_view name) const;
  bool has_subset(std::string_view name) const;
  void add_subset(NamedSubset s);

 private:
  void build_index();

  std::string name_;
  double kappa_ = 0.0;
  std::optional<double> resolution_;
  std::size_t n_ = 0;
  int dim_ = 0;
  std::vector<double> coords_;
  bool euclidean_ = false;
  std::vector<double> matrix_;
  std::shared_ptr<const GridIndex> index_;
  std::vector<NamedSubset> subsets_;
};

/// Undirected link graph on subset-local indices; edges join points at
/// distance <= link_radius, weighted by the ambient distance.
struct LinkGraph {
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> targets;
  std::vector<double> weights;

  std::size_t size() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

/// Shortest-path metric of a link graph. +inf between components.
struct IntrinsicMetric {
  std::size_t n = 0;
  std::vector<double> d;
  int components = 0;
  std::int64_t disconnected_pairs = 0;

  double at(std::size_t i, std::size_t j) const { return d[i * n + j]; }
};

/// A marked subset E of a space with its lazily computed intrinsic metric d_E.
///
/// Copies share the memoized graph and metric. Computation is thread-safe and
/// deterministic.
class Subset {
 public:
  Subset(std::shared_ptr<const Space> space, std::vector<PointId> indices, double link_radius,
         bool extremal_claim = false, std::string name = {});

  /// Subset named `name` of the space, with link radius defaulting to three
  /// sampling pitches.
  static Subset named(std::shared_ptr<const Space> space, std::string_view name,
                      std::optional<double> link_radius = std::nullopt);

  /// The whole space as a subset.
  static Subset whole(std::shared_ptr<const Space> space, std::optional<double> link_radius = std::nullopt);

  const Space& space() const { return *space_; }
  const std::shared_ptr<const Space>& space_ptr() const { return space_; }
  std::span<const PointId> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  PointId id(std::size_t local) const { return indices_[local]; }
  const std::string& name() const { return name_; }
  bool extremal_claim() const { return extremal_claim_; }
  double link_radius() const { return link_radius_; }

  bool contains(PointId p) const { return local_index(p) >= 0; }
  /// Local position of p in indices(), or -1.
  std::int64_t local_index(PointId p) const;

  /// Subset points within distance < r of p (p need not belong to the subset), sorted.
  std::vector<PointId> ball(PointId p, double r) const;

  /// min over subset points e of d(p, e), and the minimizing id (lowest id on ties).
  std::pair<double, PointId> distance_to(PointId p) const;

  const LinkGraph& link_graph() const;

  /// Full d_E matrix over local indices (memoized).
  const IntrinsicMetric& intrinsic_metric() const;

  /// Single-source d_E from a local index, optionally truncated: entries
  /// beyond `cutoff` are +inf.
  std::vector<double> intrinsic_row(std::size_t source_local, double cutoff = kInf) const;

  /// d_E(a, b) for subset members a, b.
  double intrinsic_distance(PointId a, PointId b) const;

  /// A d_E-shortest path from a to b as ambient ids (empty if disconnected).
  std::vector<PointId> intrinsic_path(PointId a, PointId b) const;

 private:
  struct Cache;
  std::shared_ptr<const Space> space_;
  std::vector<PointId> indices_;
  std::vector<std::int32_t> local_;  // ambient id -> local index or -1
  double link_radius_ = 0.0;
  bool extremal_claim_ = false;
  std::string name_;
  std::shared_ptr<Cache> cache_;
};

enum class CurveKind { gradient, intrinsic_geodesic, generic };

/// Ordered polyline of sample points.
struct Curve {
  std::vector<PointId> points;
  double step = 0.0;
  CurveKind kind = CurveKind::generic;

  /// Cumulative arc length at each vertex (first entry 0).
  std::vector<double> arc_lengths(const Space& space) const;
};

const char* to_string(CurveKind k);

// ---------------------------------------------------------------------------
// Template implementations

template <class Visit>
bool GridIndex::visit_box(std::span<const double> center, double r, Visit&& visit) const {
  if (empty()) return false;
  std::int64_t lo[3] = {0, 0, 0};
  std::int64_t hi[3] = {0, 0, 0};
  std::int64_t cells = 1;
  for (int k = 0; k < dim_; ++k) {
    const auto a = static_cast<std::int64_t>(std::floor((center[k] - r - lo_[k]) / cell_));
    const auto b = static_cast<std::int64_t>(std::floor((center[k] + r - lo_[k]) / cell_));
    lo[k] = std::max<std::int64_t>(0, a);
    hi[k] = std::min<std::int64_t>(counts_[k] - 1, b);
    if (hi[k] < lo[k]) return true;
    cells *= hi[k] - lo[k] + 1;
  }
  if (cells > static_cast<std::int64_t>(n_) / 2 + 16) return false;
  const std::int64_t c1 = dim_ > 1 ? counts_[1] : 1;
  const std::int64_t c2 = dim_ > 2 ? counts_[2] : 1;
  for (std::int64_t i = lo[0]; i <= hi[0]; ++i)
    for (std::int64_t j = lo[1]; j <= hi[1]; ++j)
      for (std::int64_t k = lo[2]; k <= hi[2]; ++k) {
        const auto cell = static_cast<std::size_t>((i * c1 + j) * c2 + k);
        for (std::uint32_t s = start_[cell]; s < start_[cell + 1]; ++s) visit(ids_[s]);
      }
  return true;
}

template <class Visit>
void Space::for_each_within(PointId p, double r, Visit&& visit) const {
  if (index_) {
    const bool used = index_->visit_box(coord(p), r, [&](PointId q) {
      const double d = dist(p, q);
      if (d <= r) visit(q, d);
    });
    if (used) return;
  }
  for (std::size_t q = 0; q < n_; ++q) {
    const double d = dist(p, static_cast<PointId>(q));
    if (d <= r) visit(static_cast<PointId>(q), d);
  }
}

}  // namespace alexkit
