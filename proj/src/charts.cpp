#include "alexkit/charts.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "alexkit/error.hpp"
#include "alexkit/kplane.hpp"
#include "alexkit/parallel.hpp"

namespace alexkit {
namespace {

constexpr double kPi = std::numbers::pi;

RatioStats summarize(std::vector<double> ratios, std::int64_t skipped) {
  RatioStats s;
  s.skipped = skipped;
  s.pairs = static_cast<std::int64_t>(ratios.size());
  if (ratios.empty()) return s;
  std::sort(ratios.begin(), ratios.end());
  auto q = [&](double f) { return ratios[static_cast<std::size_t>(std::floor(f * static_cast<double>(ratios.size() - 1)))]; };
  s.defined = true;
  s.colip = ratios.front();
  s.lip = ratios.back();
  s.min_ratio = q(0.01);
  s.max_ratio = q(0.99);
  s.median = q(0.5);
  s.distortion = std::max(s.lip - 1.0, 1.0 - s.colip);
  return s;
}

double norm_diff(const double* a, const double* b, std::size_t k) {
  double s = 0.0;
  for (std::size_t j = 0; j < k; ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

}  // namespace

std::vector<PointId> Chart::anchors() const {
  std::vector<PointId> a;
  for (const auto& pr : strainer.pairs) a.push_back(pr.first);
  return a;
}

std::vector<double> chart_value(const Space& space, const std::vector<PointId>& anchors, PointId x) {
  std::vector<double> v;
  v.reserve(anchors.size());
  for (const PointId a : anchors) v.push_back(space.dist(a, x));
  return v;
}

Chart build_chart(const Subset& subset, const Strainer& strainer, double radius, const ChartOptions& opt) {
  const Space& space = subset.space();
  Chart c;
  c.strainer = strainer;
  c.radius = radius;
  c.region = subset.ball(strainer.base, radius);
  if (c.region.size() < 2) throw RefusalError("chart region has fewer than 2 points");
  const std::size_t n = c.region.size();
  const std::size_t k = strainer.k();
  if (k == 0) throw RefusalError("a chart needs k >= 1");
  const auto anchors = c.anchors();
  c.values.resize(n * k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) c.values[i * k + j] = space.dist(anchors[j], c.region[i]);

  std::vector<std::vector<double>> ext(n), in(n);
  std::vector<std::int64_t> skipped(n, 0);
  parallel::for_each_index(n, [&](std::size_t i) {
    std::vector<double> row;
    if (opt.intrinsic) row = subset.intrinsic_row(static_cast<std::size_t>(subset.local_index(c.region[i])));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double df = norm_diff(&c.values[i * k], &c.values[j * k], k);
      ext[i].push_back(df / space.dist(c.region[i], c.region[j]));
      if (!opt.intrinsic) continue;
      const double de = row[static_cast<std::size_t>(subset.local_index(c.region[j]))];
      if (std::isfinite(de)) in[i].push_back(df / de);
      else ++skipped[i];
    }
  });
  std::vector<double> all_ext, all_in;
  std::int64_t skip = 0;
  for (std::size_t i = 0; i < n; ++i) {
    all_ext.insert(all_ext.end(), ext[i].begin(), ext[i].end());
    all_in.insert(all_in.end(), in[i].begin(), in[i].end());
    skip += skipped[i];
  }
  c.extrinsic = summarize(std::move(all_ext), 0);
  if (opt.intrinsic) c.intrinsic = summarize(std::move(all_in), skip);
  return c;
}

std::vector<std::vector<double>> direction_grid(std::size_t k, int grid) {
  std::vector<std::vector<double>> dirs;
  if (k == 0) return dirs;
  if (k == 1) return {{1.0}, {-1.0}};
  const int g = std::max(grid, 8);
  if (k == 2) {
    for (int i = 0; i < g; ++i) {
      const double a = 2.0 * kPi * i / g;
      dirs.push_back({std::cos(a), std::sin(a)});
    }
    return dirs;
  }
  if (k == 3) {
    const int n = g * g;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / n;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      dirs.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
    }
    return dirs;
  }
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> nd;
  const auto count = static_cast<std::size_t>(std::pow(g, static_cast<double>(k - 1)));
  for (std::size_t i = 0; i < std::min<std::size_t>(count, 20000); ++i) {
    std::vector<double> v(k);
    double s = 0.0;
    for (auto& x : v) {
      x = nd(rng);
      s += x * x;
    }
    for (auto& x : v) x /= std::sqrt(s);
    dirs.push_back(std::move(v));
  }
  return dirs;
}

Openness openness_measure(const Chart& chart, const Subset& subset, int grid) {
  const Space& space = subset.space();
  const std::size_t k = chart.k();
  const auto dirs = direction_grid(k, grid);
  const auto anchors = chart.anchors();
  const std::size_t n = chart.region.size();
  struct Local {
    double worst = 0.0;
    std::size_t dir = 0;
    bool isolated = false;
  };
  std::vector<Local> loc(n);
  parallel::for_each_index(n, [&](std::size_t i) {
    const PointId p = chart.region[i];
    const double* fp = &chart.values[i * k];
    std::vector<std::vector<double>> quot;
    for (const PointId q : subset.ball(p, chart.radius)) {
      if (q == p) continue;
      const auto fq = chart_value(space, anchors, q);
      const double d = space.dist(p, q);
      std::vector<double> v(k);
      for (std::size_t j = 0; j < k; ++j) v[j] = (fq[j] - fp[j]) / d;
      quot.push_back(std::move(v));
    }
    if (quot.empty()) {
      loc[i].isolated = true;
      return;
    }
    for (std::size_t t = 0; t < dirs.size(); ++t) {
      double best = kInf;
      for (const auto& v : quot) best = std::min(best, norm_diff(v.data(), dirs[t].data(), k));
      if (best > loc[i].worst) {
        loc[i].worst = best;
        loc[i].dir = t;
      }
    }
  });
  Openness o;
  for (std::size_t i = 0; i < n; ++i) {
    if (loc[i].isolated) {
      ++o.isolated;
      continue;
    }
    if (loc[i].worst > o.eps_open || o.worst_point < 0) {
      o.eps_open = loc[i].worst;
      o.worst_point = chart.region[i];
      o.worst_direction = dirs[loc[i].dir];
    }
  }
  return o;
}

MetricComparison metric_comparison(const Subset& subset, PointId p, double radius) {
  const Space& space = subset.space();
  const double h = space.resolution_or(0.0);
  if (radius < 4.0 * h * (1.0 - 1e-12)) throw RefusalError("metric comparison radius must be at least 4h");
  const auto ball = subset.ball(p, radius);
  const std::size_t n = ball.size();
  struct Local {
    double ratio = 0.0;
    PointId b = -1;
    std::int64_t pairs = 0;
  };
  std::vector<Local> loc(n);
  parallel::for_each_index(n, [&](std::size_t i) {
    const auto row = subset.intrinsic_row(static_cast<std::size_t>(subset.local_index(ball[i])));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double de = row[static_cast<std::size_t>(subset.local_index(ball[j]))];
      const double r = de / space.dist(ball[i], ball[j]);
      ++loc[i].pairs;
      if (r > loc[i].ratio) {
        loc[i].ratio = r;
        loc[i].b = ball[j];
      }
    }
  });
  MetricComparison mc;
  mc.max_ratio = n >= 2 ? 0.0 : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    mc.pairs += loc[i].pairs;
    if (loc[i].b >= 0 && loc[i].ratio > mc.max_ratio) {
      mc.max_ratio = loc[i].ratio;
      mc.a = ball[i];
      mc.b = loc[i].b;
    }
  }
  return mc;
}

QuasigeodesicCheck quasigeodesic_check(const Space& space, const Curve& path, PointId p) {
  space.check_id(p);
  const std::size_t n = path.points.size();
  for (const PointId x : path.points) {
    space.check_id(x);
    if (x == p) throw RefusalError("viewpoint lies on the path");
  }
  if (!(path.step > 0.0)) throw RefusalError("path step must be positive");
  const auto s = path.arc_lengths(space);
  for (std::size_t i = 1; i < n; ++i) {
    const double gap = s[i] - s[i - 1];
    if (!(gap > 0.0) || gap > 1.5 * path.step) throw RefusalError("path gaps must lie in (0, 1.5 * step]");
  }
  const double tau_max = kplane::model_diameter(space.kappa());
  std::vector<QuasigeodesicCheck> loc(n);
  parallel::for_each_index(n, [&](std::size_t i) {
    const double dpi = space.dist(p, path.points[i]);
    double running = kInf;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double tau = s[j] - s[i];
      if (tau > tau_max) break;
      const double a = kplane::comparison_angle(space.kappa(), dpi, tau, space.dist(p, path.points[j]),
                                                kplane::Degenerate::zero);
      ++loc[i].angles;
      if (a - running > loc[i].violation) {
        loc[i].violation = a - running;
        loc[i].at_start = i;
        loc[i].at_end = j;
      }
      running = std::min(running, a);
    }
  });
  QuasigeodesicCheck out;
  for (const auto& l : loc) {
    out.angles += l.angles;
    if (l.violation > out.violation) {
      out.violation = l.violation;
      out.at_start = l.at_start;
      out.at_end = l.at_end;
    }
  }
  return out;
}

DistortionTrend distortion_trend(const std::vector<Chart>& family) {
  if (family.size() < 3) throw RefusalError("a distortion trend needs at least 3 charts");
  DistortionTrend t;
  for (const auto& c : family) {
    t.extrinsic.push_back(c.extrinsic.distortion);
    t.intrinsic.push_back(c.intrinsic.distortion);
  }
  for (std::size_t i = 1; i < family.size(); ++i) {
    t.extrinsic_nonincreasing = t.extrinsic_nonincreasing && t.extrinsic[i] <= t.extrinsic[i - 1];
    t.intrinsic_nonincreasing = t.intrinsic_nonincreasing && t.intrinsic[i] <= t.intrinsic[i - 1];
    t.extrinsic_strict = t.extrinsic_strict && t.extrinsic[i] < t.extrinsic[i - 1];
    t.intrinsic_strict = t.intrinsic_strict && t.intrinsic[i] < t.intrinsic[i - 1];
  }
  return t;
}

}  // namespace alexkit
