#include "alexkit/measure.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <tuple>

#include "alexkit/error.hpp"
#include "alexkit/kernels.hpp"
#include "alexkit/kplane.hpp"
#include "alexkit/parallel.hpp"

namespace alexkit {

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

const char* to_string(MetricKind k) { return k == MetricKind::intrinsic ? "intrinsic" : "extrinsic"; }

namespace {

struct Worst {
  double value = 0.0;
  std::vector<PointId> witness;
  void offer(double v, std::vector<PointId> w) {
    if (v > value) {
      value = v;
      witness = std::move(w);
    }
  }
};

// Merges per-row results in row order so the outcome is schedule independent.
Worst reduce(std::vector<Worst>& rows) {
  Worst w;
  for (auto& r : rows) w.offer(r.value, std::move(r.witness));
  return w;
}

ValidationCheck make_check(std::string name, const Worst& w, std::int64_t checked) {
  ValidationCheck c;
  c.name = std::move(name);
  c.passed = w.value == 0.0;
  c.worst = w.value;
  c.witness = w.witness;
  c.checked = checked;
  return c;
}

}  // namespace

ValidationReport validate(const Space& space, std::uint64_t seed, std::int64_t random_triples) {
  ValidationReport rep;
  const std::size_t n = space.size();
  const auto N = static_cast<std::int64_t>(n);
  double scale = 0.0;
  std::vector<Worst> diag(n), sym(n), pos(n);
  std::vector<double> row_max(n, 0.0);
  const bool dense = !space.is_euclidean();

  parallel::for_each_index(n, [&](std::size_t i) {
    const auto a = static_cast<PointId>(i);
    const double dii = space.dist(a, a);
    if (dii != 0.0 || !std::isfinite(dii)) diag[i].offer(std::isfinite(dii) ? std::abs(dii) : kInf, {a});
    if (dense) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto b = static_cast<PointId>(j);
        const double d = space.dist(a, b);
        row_max[i] = std::max(row_max[i], d);
        if (j <= i) continue;
        const double e = space.dist(b, a);
        if (d != e) sym[i].offer(std::isfinite(d - e) ? std::abs(d - e) : kInf, {a, b});
        if (!(d > 0.0)) pos[i].offer(std::isfinite(d) ? 1.0 + std::abs(d) : kInf, {a, b});
      }
    } else {
      // Euclidean distances are symmetric by construction; only coincident points can fail.
      space.for_each_within(a, 0.0, [&](PointId b, double) {
        if (b > a) pos[i].offer(1.0, {a, b});
      });
    }
  });
  const std::int64_t pairs = N * (N - 1) / 2;
  rep.checks.push_back(make_check("zero_diagonal", reduce(diag), N));
  rep.checks.push_back(make_check("symmetry", reduce(sym), pairs));
  rep.checks.push_back(make_check("positivity", reduce(pos), pairs));

  if (dense) {
    scale = *std::max_element(row_max.begin(), row_max.end());
  } else {
    scale = 1.0;
  }
  const double tol = 1e-12 * std::max(1.0, scale);

  Worst tri;
  std::int64_t checked = 0;
  if (n <= 300) {
    std::vector<Worst> rows(n);
    parallel::for_each_index(n, [&](std::size_t i) {
      const auto a = static_cast<PointId>(i);
      for (std::size_t k = i + 1; k < n; ++k) {
        const auto c = static_cast<PointId>(k);
        const double dac = space.dist(a, c);
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i || j == k) continue;
          const auto b = static_cast<PointId>(j);
          const double excess = dac - space.dist(a, b) - space.dist(b, c);
          if (excess > tol) rows[i].offer(excess, {a, b, c});
        }
      }
    });
    tri = reduce(rows);
    checked = N * (N - 1) * (N - 2) / 2;
  } else {
    rep.exhaustive_triangles = false;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<PointId> pick(0, static_cast<PointId>(n - 1));
    for (std::int64_t t = 0; t < random_triples; ++t) {
      const PointId a = pick(rng), b = pick(rng), c = pick(rng);
      if (a == b || b == c || a == c) continue;
      const double excess = space.dist(a, c) - space.dist(a, b) - space.dist(b, c);
      if (excess > tol) tri.offer(excess, {std::min(a, c), b, std::max(a, c)});
      ++checked;
    }
  }
  rep.checks.push_back(make_check("triangle_inequality", tri, checked));

  if (space.kappa() > 0.0) {
    const double bound = kplane::model_diameter(space.kappa()) + 1e-9;
    std::vector<Worst> rows(n);
    parallel::for_each_index(n, [&](std::size_t i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = space.dist(static_cast<PointId>(i), static_cast<PointId>(j));
        if (d > bound) rows[i].offer(d - bound, {static_cast<PointId>(i), static_cast<PointId>(j)});
      }
    });
    rep.checks.push_back(make_check("kappa_diameter", reduce(rows), pairs));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Packing

namespace {

inline double block_radius(double eps) { return eps * (1.0 + 1e-9); }

PackingResult greedy_packing(const Space& space, std::span<const PointId> ids, double eps) {
  PackingResult r;
  std::vector<PointId> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::uint8_t> blocked(space.size(), 0);
  const double rb = block_radius(eps);
  const bool use_ball = sorted.size() * 8 >= space.size();
  for (const PointId p : sorted) {
    if (blocked[static_cast<std::size_t>(p)]) continue;
    r.centers.push_back(p);
    if (use_ball) {
      space.for_each_within(p, rb, [&](PointId q, double) { blocked[static_cast<std::size_t>(q)] = 1; });
    } else {
      for (const PointId q : sorted)
        if (space.dist(p, q) <= rb) blocked[static_cast<std::size_t>(q)] = 1;
    }
  }
  r.count = static_cast<std::int64_t>(r.centers.size());
  return r;
}

PackingResult farthest_packing(const Space& space, std::span<const PointId> ids, double eps) {
  PackingResult r;
  if (ids.empty()) return r;
  std::vector<PointId> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> gap(sorted.size(), kInf);
  std::size_t next = 0;
  const double rb = block_radius(eps);
  for (;;) {
    const PointId c = sorted[next];
    r.centers.push_back(c);
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      gap[i] = std::min(gap[i], space.dist(c, sorted[i]));
      if (gap[i] > best) {
        best = gap[i];
        arg = i;
      }
    }
    if (!(best > rb)) break;
    next = arg;
  }
  r.count = static_cast<std::int64_t>(r.centers.size());
  return r;
}

struct ExactSearch {
  std::vector<std::uint32_t> conflict;  // bitmask of points within eps
  std::uint32_t best_set = 0;
  int best = 0;

  void run(std::uint32_t chosen, std::uint32_t candidates, int size) {
    if (candidates == 0) {
      if (size > best) {
        best = size;
        best_set = chosen;
      }
      return;
    }
    if (size + std::popcount(candidates) <= best) return;
    const int v = std::countr_zero(candidates);
    const std::uint32_t bit = 1u << v;
    run(chosen | bit, candidates & ~conflict[static_cast<std::size_t>(v)] & ~bit, size + 1);
    run(chosen, candidates & ~bit, size);
  }
};

PackingResult exact_packing(const Space& space, std::span<const PointId> ids, double eps) {
  if (ids.size() > 25) throw RefusalError("exact packing is limited to 25 points");
  std::vector<PointId> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  ExactSearch s;
  s.conflict.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && space.dist(sorted[i], sorted[j]) <= eps) s.conflict[i] |= 1u << j;
  const std::uint32_t all = n == 32 ? ~0u : ((1u << n) - 1u);
  s.run(0, all, 0);
  PackingResult r;
  r.exact = true;
  for (std::size_t i = 0; i < n; ++i)
    if (s.best_set & (1u << i)) r.centers.push_back(sorted[i]);
  r.count = static_cast<std::int64_t>(r.centers.size());
  return r;
}

}  // namespace

PackingResult packing(const Space& space, std::span<const PointId> ids, double eps, PackingMode mode) {
  if (!(eps > 0.0)) throw RefusalError("packing needs eps > 0");
  for (const PointId p : ids) space.check_id(p);
  switch (mode) {
    case PackingMode::greedy:
      return greedy_packing(space, ids, eps);
    case PackingMode::farthest:
      return farthest_packing(space, ids, eps);
    case PackingMode::exact:
      return exact_packing(space, ids, eps);
  }
  return {};
}

PackingResult intrinsic_packing(const Subset& subset, double eps) {
  if (!(eps > 0.0)) throw RefusalError("packing needs eps > 0");
  PackingResult r;
  const std::size_t n = subset.size();
  std::vector<std::uint8_t> blocked(n, 0);
  const double rb = block_radius(eps);
  for (std::size_t i = 0; i < n; ++i) {
    if (blocked[i]) continue;
    r.centers.push_back(subset.id(i));
    const auto row = subset.intrinsic_row(i, rb);
    for (std::size_t j = 0; j < n; ++j)
      if (row[j] <= rb) blocked[j] = 1;
  }
  r.count = static_cast<std::int64_t>(r.centers.size());
  return r;
}

double measured_pitch(const Space& space, std::span<const PointId> ids) {
  if (ids.size() < 2) return 0.0;
  std::vector<std::uint8_t> member(space.size(), 0);
  for (const PointId p : ids) member[static_cast<std::size_t>(p)] = 1;
  const double probe = space.resolution() ? 4.0 * *space.resolution() : 0.0;
  std::vector<double> nn(ids.size(), kInf);
  parallel::for_each_index(ids.size(), [&](std::size_t i) {
    const PointId p = ids[i];
    double best = kInf;
    if (probe > 0.0)
      space.for_each_within(p, probe, [&](PointId q, double d) {
        if (q != p && member[static_cast<std::size_t>(q)] && d < best) best = d;
      });
    if (!std::isfinite(best))
      for (const PointId q : ids)
        if (q != p) best = std::min(best, space.dist(p, q));
    nn[i] = best;
  });
  std::sort(nn.begin(), nn.end());
  return nn[nn.size() / 2];
}

namespace {

// Bulk packing density of the sampling lattice: a cube of side K much larger
// than eps is packed greedily in id order, and only centers in the middle
// half [K/4, 3K/4)^m are counted, so neither the cube boundary nor the
// quantization of the last gap enters the constant. The lattice matches the
// models: regular grid for m = 1 and 3, triangular lattice for m = 2.
struct Calibration {
  Space cube;
  double side = 0.0;
};

Calibration calibration_cube(int m, double eps, double pitch) {
  constexpr double kMaxPoints = 2.0e6;
  double side = 0.0;
  std::vector<double> coords;
  if (m == 1) {
    side = std::max(1.0, 4000.0 * eps);
    side = std::min(side, kMaxPoints * pitch);
    const auto k = static_cast<std::int64_t>(std::floor(side / pitch));
    for (std::int64_t i = 0; i <= k; ++i) coords.push_back(static_cast<double>(i) * pitch);
  } else if (m == 2) {
    side = std::max(1.0, 120.0 * eps);
    side = std::min(side, std::sqrt(kMaxPoints / 1.16) * pitch);
    const double dy = pitch * std::sqrt(3.0) / 2.0;
    const auto rows = static_cast<std::int64_t>(std::floor(side / dy + 1e-9));
    const auto cols = static_cast<std::int64_t>(std::floor(side / pitch + 1e-9));
    for (std::int64_t j = 0; j <= rows; ++j) {
      const double y = static_cast<double>(j) * dy;
      const double off = (j % 2 == 1) ? pitch / 2.0 : 0.0;
      for (std::int64_t i = 0; i <= cols; ++i) {
        coords.push_back(off + static_cast<double>(i) * pitch);
        coords.push_back(y);
      }
    }
  } else {
    side = std::max(1.0, 30.0 * eps);
    side = std::min(side, std::cbrt(kMaxPoints) * pitch);
    const auto k = static_cast<std::int64_t>(std::floor(side / pitch));
    for (std::int64_t i = 0; i <= k; ++i)
      for (std::int64_t j = 0; j <= k; ++j)
        for (std::int64_t l = 0; l <= k; ++l) {
          coords.push_back(static_cast<double>(i) * pitch);
          coords.push_back(static_cast<double>(j) * pitch);
          coords.push_back(static_cast<double>(l) * pitch);
        }
  }
  return {Space::euclidean("calibration-cube", m, std::move(coords), 0.0, pitch), side};
}

}  // namespace

double calibration_constant(int m, double eps, double pitch) {
  if (m < 0 || m > 3) throw RefusalError("measure estimates support m in 0..3");
  if (m == 0) return 1.0;
  if (!(pitch > 0.0) || !(eps > 0.0)) throw RefusalError("calibration needs positive eps and pitch");
  static std::mutex mu;
  static std::map<std::tuple<int, double, double>, double> cache;
  const auto key = std::make_tuple(m, eps, pitch);
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const Calibration cal = calibration_cube(m, eps, pitch);
  std::vector<PointId> ids(cal.cube.size());
  std::iota(ids.begin(), ids.end(), 0);
  const auto centers = greedy_packing(cal.cube, ids, eps).centers;
  const double lo = cal.side / 4.0, hi = 3.0 * cal.side / 4.0;
  std::int64_t inner = 0;
  for (const PointId c : centers) {
    const auto x = cal.cube.coord(c);
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v >= lo && v < hi; })) ++inner;
  }
  if (inner == 0) throw RefusalError("calibration cube too small for eps");
  const double c = std::pow(hi - lo, m) / (std::pow(eps, m) * static_cast<double>(inner));
  std::lock_guard lock(mu);
  cache.emplace(key, c);
  return c;
}

MeasureEstimate hausdorff_measure_estimate(const Subset& subset, int m, double eps, MetricKind metric) {
  const Space& space = subset.space();
  MeasureEstimate e;
  e.m = m;
  e.eps = eps;
  e.metric = metric;
  e.pitch = measured_pitch(space, subset.indices());
  const double h = space.resolution_or(e.pitch);
  if (eps < 2.0 * h * (1.0 - 1e-12))
    throw RefusalError("eps = " + std::to_string(eps) + " is below twice the sampling resolution " + std::to_string(h));
  const double pitch = e.pitch > 0.0 ? e.pitch : h;
  e.c_m = calibration_constant(m, eps, pitch);
  e.beta = metric == MetricKind::intrinsic ? intrinsic_packing(subset, eps).count
                                           : greedy_packing(space, subset.indices(), eps).count;
  e.value = e.c_m * std::pow(eps, m) * static_cast<double>(e.beta);
  return e;
}

DimensionEstimate packing_dimension_estimate(const Space& space, std::span<const PointId> ids,
                                             std::vector<double> eps_grid) {
  std::sort(eps_grid.begin(), eps_grid.end());
  eps_grid.erase(std::unique(eps_grid.begin(), eps_grid.end()), eps_grid.end());
  if (eps_grid.size() < 3) throw RefusalError("dimension estimate needs at least 3 distinct eps values");
  if (!(eps_grid.front() > 0.0)) throw RefusalError("eps values must be positive");
  if (eps_grid.back() < 10.0 * eps_grid.front() * (1.0 - 1e-9))
    throw RefusalError("eps grid must span at least a decade");
  if (space.resolution() && eps_grid.front() < 2.0 * *space.resolution() * (1.0 - 1e-12))
    throw RefusalError("eps grid reaches below twice the sampling resolution");

  DimensionEstimate d;
  d.eps = eps_grid;
  for (const double eps : eps_grid) d.beta.push_back(greedy_packing(space, ids, eps).count);
  const auto n = static_cast<double>(eps_grid.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    const double x = std::log(1.0 / eps_grid[i]);
    const double y = std::log(static_cast<double>(std::max<std::int64_t>(1, d.beta[i])));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  d.slope = (n * sxy - sx * sy) / den;
  const double icpt = (sy - d.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    const double x = std::log(1.0 / eps_grid[i]);
    const double y = std::log(static_cast<double>(std::max<std::int64_t>(1, d.beta[i])));
    ss += (y - icpt - d.slope * x) * (y - icpt - d.slope * x);
  }
  d.residual = std::sqrt(ss / n);
  return d;
}

}  // namespace alexkit
