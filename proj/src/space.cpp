#include "alexkit/space.hpp"

#include <mutex>
#include <numeric>
#include <stdexcept>

#include "alexkit/error.hpp"
#include "alexkit/kernels.hpp"
#include "alexkit/parallel.hpp"

namespace alexkit {

GridIndex::GridIndex(int dim, std::span<const double> coords, std::size_t n, double cell_hint)
    : dim_(dim), n_(n) {
  if (dim < 1 || dim > 3 || n == 0) return;
  lo_.assign(static_cast<std::size_t>(dim), kInf);
  std::vector<double> hi(static_cast<std::size_t>(dim), -kInf);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k) {
      const double v = coords[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)];
      lo_[static_cast<std::size_t>(k)] = std::min(lo_[static_cast<std::size_t>(k)], v);
      hi[static_cast<std::size_t>(k)] = std::max(hi[static_cast<std::size_t>(k)], v);
    }
  double cell = cell_hint;
  if (!(cell > 0.0)) {
    double vol = 1.0;
    for (int k = 0; k < dim; ++k) vol *= std::max(1e-12, hi[static_cast<std::size_t>(k)] - lo_[static_cast<std::size_t>(k)]);
    cell = 2.0 * std::pow(vol / static_cast<double>(n), 1.0 / dim);
  }
  // Keep the number of cells within a small multiple of n.
  for (;;) {
    std::int64_t total = 1;
    counts_.assign(static_cast<std::size_t>(dim), 1);
    for (int k = 0; k < dim; ++k) {
      counts_[static_cast<std::size_t>(k)] =
          static_cast<std::int64_t>(std::floor((hi[static_cast<std::size_t>(k)] - lo_[static_cast<std::size_t>(k)]) / cell)) + 1;
      total *= counts_[static_cast<std::size_t>(k)];
    }
    if (total <= static_cast<std::int64_t>(4 * n + 64)) break;
    cell *= 1.5;
  }
  cell_ = cell;
  std::int64_t total = 1;
  for (auto c : counts_) total *= c;
  const std::int64_t c1 = dim > 1 ? counts_[1] : 1;
  const std::int64_t c2 = dim > 2 ? counts_[2] : 1;
  std::vector<std::uint32_t> cell_of(n);
  start_.assign(static_cast<std::size_t>(total) + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t idx[3] = {0, 0, 0};
    for (int k = 0; k < dim; ++k)
      idx[k] = static_cast<std::int64_t>(
          std::floor((coords[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)] - lo_[static_cast<std::size_t>(k)]) / cell_));
    cell_of[i] = static_cast<std::uint32_t>((idx[0] * c1 + idx[1]) * c2 + idx[2]);
    ++start_[cell_of[i] + 1];
  }
  std::partial_sum(start_.begin(), start_.end(), start_.begin());
  ids_.resize(n);
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) ids_[fill[cell_of[i]]++] = static_cast<PointId>(i);
}

Space Space::euclidean(std::string name, int dim, std::vector<double> coords, double kappa,
                       std::optional<double> resolution) {
  if (dim < 1) throw Error("euclidean space needs dim >= 1");
  if (coords.size() % static_cast<std::size_t>(dim) != 0) throw Error("coordinate count is not a multiple of dim");
  Space s;
  s.name_ = std::move(name);
  s.kappa_ = kappa;
  s.resolution_ = resolution;
  s.dim_ = dim;
  s.n_ = coords.size() / static_cast<std::size_t>(dim);
  s.coords_ = std::move(coords);
  s.euclidean_ = true;
  s.build_index();
  return s;
}

Space Space::from_matrix(std::string name, double kappa, std::size_t n, std::vector<double> matrix,
                         std::optional<double> resolution) {
  if (matrix.size() != n * n) throw Error("distance matrix must have n*n entries");
  Space s;
  s.name_ = std::move(name);
  s.kappa_ = kappa;
  s.resolution_ = resolution;
  s.n_ = n;
  s.matrix_ = std::move(matrix);
  return s;
}

void Space::set_coords(int dim, std::vector<double> coords) {
  if (euclidean_) throw Error("cannot replace the coordinates of a euclidean space");
  if (dim < 1 || coords.size() != n_ * static_cast<std::size_t>(dim)) throw Error("coordinate array has wrong size");
  dim_ = dim;
  coords_ = std::move(coords);
}

void Space::build_index() {
  if (!euclidean_ || dim_ > 3 || n_ < 64) {
    index_.reset();
    return;
  }
  const double hint = resolution_ ? 2.0 * *resolution_ : 0.0;
  index_ = std::make_shared<const GridIndex>(dim_, coords_, n_, hint);
}

void Space::check_id(PointId p) const {
  if (p < 0 || static_cast<std::size_t>(p) >= n_) throw Error("unknown point id " + std::to_string(p));
}

std::vector<PointId> Space::ball(PointId p, double r) const {
  check_id(p);
  std::vector<PointId> out;
  if (!(r > 0.0)) return out;
  for_each_within(p, r, [&](PointId q, double d) {
    if (d < r) out.push_back(q);
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PointId> Space::closed_ball(PointId p, double r) const {
  check_id(p);
  std::vector<PointId> out;
  for_each_within(p, r, [&](PointId q, double) { out.push_back(q); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PointId> Space::annulus(PointId p, double lo, double hi) const {
  check_id(p);
  std::vector<PointId> out;
  for_each_within(p, hi, [&](PointId q, double d) {
    if (d > lo && d < hi) out.push_back(q);
  });
  std::sort(out.begin(), out.end());
  return out;
}

double Space::diameter() const {
  std::vector<double> row_max(n_, 0.0);
  parallel::for_each_index(n_, [&](std::size_t i) {
    double m = 0.0;
    for (std::size_t j = i + 1; j < n_; ++j) m = std::max(m, dist(static_cast<PointId>(i), static_cast<PointId>(j)));
    row_max[i] = m;
  });
  return row_max.empty() ? 0.0 : *std::max_element(row_max.begin(), row_max.end());
}

const NamedSubset& Space::subset(std::string_view name) const {
  for (const auto& s : subsets_)
    if (s.name == name) return s;
  throw RefusalError("space '" + name_ + "' has no subset named '" + std::string(name) + "'");
}

bool Space::has_subset(std::string_view name) const {
  return std::any_of(subsets_.begin(), subsets_.end(), [&](const NamedSubset& s) { return s.name == name; });
}

void Space::add_subset(NamedSubset s) {
  for (const PointId p : s.indices) check_id(p);
  for (auto& existing : subsets_)
    if (existing.name == s.name) {
      existing = std::move(s);
      return;
    }
  subsets_.push_back(std::move(s));
}

// ---------------------------------------------------------------------------

struct Subset::Cache {
  std::once_flag graph_once;
  LinkGraph graph;
  std::once_flag metric_once;
  IntrinsicMetric metric;
};

Subset::Subset(std::shared_ptr<const Space> space, std::vector<PointId> indices, double link_radius,
               bool extremal_claim, std::string name)
    : space_(std::move(space)),
      indices_(std::move(indices)),
      link_radius_(link_radius),
      extremal_claim_(extremal_claim),
      name_(std::move(name)),
      cache_(std::make_shared<Cache>()) {
  if (!space_) throw Error("subset needs a space");
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  local_.assign(space_->size(), -1);
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    space_->check_id(indices_[i]);
    local_[static_cast<std::size_t>(indices_[i])] = static_cast<std::int32_t>(i);
  }
  if (!(link_radius_ > 0.0)) throw RefusalError("subset link radius must be positive");
}

namespace {
double default_link_radius(const Space& space, std::span<const PointId> ids) {
  if (space.resolution()) return 3.0 * *space.resolution();
  // Three times the median nearest-neighbour spacing.
  std::vector<double> nn;
  nn.reserve(ids.size());
  for (const PointId a : ids) {
    double best = kInf;
    for (const PointId b : ids)
      if (a != b) best = std::min(best, space.dist(a, b));
    if (std::isfinite(best)) nn.push_back(best);
  }
  if (nn.empty()) return 1.0;
  std::nth_element(nn.begin(), nn.begin() + static_cast<std::ptrdiff_t>(nn.size() / 2), nn.end());
  return 3.0 * nn[nn.size() / 2];
}
}  // namespace

Subset Subset::named(std::shared_ptr<const Space> space, std::string_view name, std::optional<double> link_radius) {
  const NamedSubset& ns = space->subset(name);
  const double lr = link_radius.value_or(default_link_radius(*space, ns.indices));
  return Subset(space, ns.indices, lr, ns.extremal, ns.name);
}

Subset Subset::whole(std::shared_ptr<const Space> space, std::optional<double> link_radius) {
  std::vector<PointId> ids(space->size());
  std::iota(ids.begin(), ids.end(), 0);
  const double lr = link_radius.value_or(space->resolution() ? 3.0 * *space->resolution()
                                                              : default_link_radius(*space, ids));
  return Subset(space, std::move(ids), lr, true, "whole");
}

std::int64_t Subset::local_index(PointId p) const {
  if (p < 0 || static_cast<std::size_t>(p) >= local_.size()) return -1;
  return local_[static_cast<std::size_t>(p)];
}

std::vector<PointId> Subset::ball(PointId p, double r) const {
  std::vector<PointId> out;
  if (!(r > 0.0)) return out;
  space_->check_id(p);
  if (indices_.size() * 4 < space_->size()) {
    for (const PointId q : indices_)
      if (space_->dist(p, q) < r) out.push_back(q);
    return out;
  }
  space_->for_each_within(p, r, [&](PointId q, double d) {
    if (d < r && contains(q)) out.push_back(q);
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<double, PointId> Subset::distance_to(PointId p) const {
  double best = kInf;
  PointId arg = -1;
  for (const PointId q : indices_) {
    const double d = space_->dist(p, q);
    if (d < best) {
      best = d;
      arg = q;
    }
  }
  return {best, arg};
}

const LinkGraph& Subset::link_graph() const {
  std::call_once(cache_->graph_once,
                 [&] { cache_->graph = kernels::build_link_graph(*space_, indices_, link_radius_); });
  return cache_->graph;
}

const IntrinsicMetric& Subset::intrinsic_metric() const {
  std::call_once(cache_->metric_once, [&] {
    const LinkGraph& g = link_graph();
    IntrinsicMetric m;
    m.n = g.size();
    m.d = kernels::omp::all_pairs_geodesic(g);
    // components by union over finite entries of each row's first reachable
    std::vector<int> comp(m.n, -1);
    for (std::size_t i = 0; i < m.n; ++i) {
      if (comp[i] >= 0) continue;
      for (std::size_t j = i; j < m.n; ++j)
        if (std::isfinite(m.at(i, j))) comp[j] = m.components;
      ++m.components;
    }
    for (std::size_t i = 0; i < m.n; ++i)
      for (std::size_t j = i + 1; j < m.n; ++j)
        if (!std::isfinite(m.at(i, j))) ++m.disconnected_pairs;
    cache_->metric = std::move(m);
  });
  return cache_->metric;
}

std::vector<double> Subset::intrinsic_row(std::size_t source_local, double cutoff) const {
  std::vector<double> row;
  kernels::dijkstra(link_graph(), source_local, cutoff, row);
  return row;
}

double Subset::intrinsic_distance(PointId a, PointId b) const {
  const auto la = local_index(a);
  const auto lb = local_index(b);
  if (la < 0 || lb < 0) throw Error("intrinsic_distance: point not in subset");
  return intrinsic_row(static_cast<std::size_t>(la))[static_cast<std::size_t>(lb)];
}

std::vector<PointId> Subset::intrinsic_path(PointId a, PointId b) const {
  const auto la = local_index(a);
  const auto lb = local_index(b);
  if (la < 0 || lb < 0) throw Error("intrinsic_path: point not in subset");
  std::vector<double> dist;
  std::vector<std::int32_t> parent;
  kernels::dijkstra(link_graph(), static_cast<std::size_t>(la), kInf, dist, &parent);
  if (!std::isfinite(dist[static_cast<std::size_t>(lb)])) return {};
  std::vector<PointId> path;
  for (std::int64_t v = lb; v >= 0; v = parent[static_cast<std::size_t>(v)]) path.push_back(indices_[static_cast<std::size_t>(v)]);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<double> Curve::arc_lengths(const Space& space) const {
  std::vector<double> s(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) s[i] = s[i - 1] + space.dist(points[i - 1], points[i]);
  return s;
}

const char* to_string(CurveKind k) {
  switch (k) {
    case CurveKind::gradient:
      return "gradient";
    case CurveKind::intrinsic_geodesic:
      return "intrinsic-geodesic";
    case CurveKind::generic:
      return "generic";
  }
  return "generic";
}

}  // namespace alexkit
