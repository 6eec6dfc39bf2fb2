// One line per acceptance criterion. Tolerances live next to each check and
// are never loosened to make a run pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "alexkit/charts.hpp"
#include "alexkit/error.hpp"
#include "alexkit/extremality.hpp"
#include "alexkit/flow.hpp"
#include "alexkit/glue.hpp"
#include "alexkit/kplane.hpp"
#include "alexkit/measure.hpp"
#include "alexkit/models.hpp"
#include "alexkit/strainers.hpp"

using namespace alexkit;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [miss]");
  }
};

std::string f(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

PointId near(const Space& s, double x, double y) {
  PointId best = 0;
  double bd = kInf;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = s.coord(static_cast<PointId>(i));
    const double d = std::hypot(c[0] - x, c[1] - y);
    if (d < bd) bd = d, best = static_cast<PointId>(i);
  }
  return best;
}

double corner_distance(const Space& s, PointId p, double side = 1.0) {
  const auto c = s.coord(p);
  double best = kInf;
  for (const double x : {0.0, side})
    for (const double y : {0.0, side}) best = std::min(best, std::hypot(c[0] - x, c[1] - y));
  return best;
}

// --- 1 ---------------------------------------------------------------------

Outcome kplane_round_trip() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ang(0.0, pi);
  double worst = 0.0;
  int count = 0;
  for (const double kappa : {-1.0, 0.0, 1.0}) {
    std::uniform_real_distribution<double> len(0.05, kappa > 0 ? 2.5 : 3.0);
    for (int i = 0; i < 1000; ++i) {
      const double l1 = len(rng), l2 = len(rng), a = ang(rng);
      const double qr = kplane::side_from_angle(kappa, l1, l2, a);
      if (qr == 0.0) continue;
      worst = std::max(worst, std::abs(kplane::comparison_angle(kappa, l1, l2, qr) - a));
      ++count;
    }
  }
  o.require(count == 3000 && worst < 1e-9, std::to_string(count) + " triangles, max error " + f(worst, 3) + " (< 1e-9)");

  bool conventions = kplane::comparison_angle(0, 1, 1, 3, kplane::Degenerate::zero) == 0.0 &&
                     kplane::comparison_angle(1, 2.5, 2.5, 2.5, kplane::Degenerate::zero) == 0.0;
  try {
    kplane::comparison_angle(0, 1, 1, 3);
    conventions = false;
  } catch (const NonexistenceError&) {
  }
  try {
    kplane::comparison_angle(0, 0, 1, 1);
    conventions = false;
  } catch (const UndefinedAngleError&) {
  }
  o.require(conventions, "nonexistent triangles give exactly 0 in zero mode and raise otherwise");
  return o;
}

// --- 2 ---------------------------------------------------------------------

Outcome extremality() {
  Outcome o;
  const double h = 0.01, wr = 0.1;
  const auto sq = models::square(1.0, h);
  const auto b = extremality_check(Subset::named(sq.space, "boundary"), {.witness_radius = wr});
  const double bound = 0.05 + 2 * h / wr;
  o.require(b.passed && b.worst_excess <= bound,
            "square boundary excess " + f(b.worst_excess) + " (<= " + f(bound) + ")");

  const PointId mid = near(*sq.space, 0.5, 0.5);
  const auto interior = extremality_check(Subset(sq.space, {mid}, 3 * h), {.witness_radius = wr});
  o.require(!interior.passed, "interior point fails, excess " + f(interior.worst_excess));

  const double hc = 0.02, wc = 0.2;
  for (const double theta : {pi / 2, pi}) {
    const auto c = models::cone(theta, 1.0, hc);
    const auto r = extremality_check(Subset::named(c.space, "vertex"), {.witness_radius = wc});
    const double cb = 0.05 + 2 * hc / wc;
    o.require(r.passed && r.worst_excess <= cb,
              "cone(" + f(theta / pi, 2) + "pi) vertex excess " + f(r.worst_excess) + " (<= " + f(cb) + ")");
  }
  const auto wide = models::cone(3 * pi / 2, 1.0, hc);
  const auto w = extremality_check(Subset::named(wide.space, "vertex"), {.witness_radius = wc});
  o.require(!w.passed, "cone(1.5pi) vertex fails, excess " + f(w.worst_excess));
  return o;
}

// --- 3 ---------------------------------------------------------------------

Outcome dimension() {
  Outcome o;
  const double h = 0.005, delta = 0.1, ell = 0.05, sr = 0.1, tol = 0.15;
  // just under multiples of the pitch, so "distance > eps" does not skip a lattice step
  const std::vector<double> grid = {0.0249, 0.0399, 0.0629, 0.0999, 0.1599, 0.2499};
  const auto sq = models::square(1.0, h);
  const auto seg = models::segment(1.0, h);
  const auto cone = models::cone(pi / 2, 0.5, h);
  struct Case {
    std::string name;
    Subset subset;
    int expected;
  };
  const std::vector<Case> cases = {{"square", Subset::whole(sq.space), 2},
                                   {"square boundary", Subset::named(sq.space, "boundary"), 1},
                                   {"segment", Subset::named(seg.space, "segment"), 1},
                                   {"cone vertex", Subset::named(cone.space, "vertex"), 0}};
  for (const auto& c : cases) {
    const int sn = strainer_number(c.subset, delta, ell, sr).k;
    const std::vector<PointId> ids(c.subset.indices().begin(), c.subset.indices().end());
    const double dim = packing_dimension_estimate(c.subset.space(), ids, grid).slope;
    o.require(sn == c.expected && std::abs(dim - c.expected) <= tol,
              c.name + " strainer number " + std::to_string(sn) + ", packing dim " + f(dim, 3));
  }
  return o;
}

// --- 4 ---------------------------------------------------------------------

Outcome regular_points_trend() {
  Outcome o;
  const double h = 0.01;
  const auto sq = models::square(1.0, h);
  const auto e = Subset::named(sq.space, "boundary");
  const auto mask = classify(e, 1, 0.05, 0.03, 0.06);
  std::size_t missing = 0, far = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const PointId p = e.id(i);
    if (corner_distance(*sq.space, p) <= 0.05) continue;
    ++far;
    if (!std::binary_search(mask.member_ids.begin(), mask.member_ids.end(), p)) ++missing;
  }
  o.require(missing == 0, std::to_string(far - missing) + "/" + std::to_string(far) +
                              " edge points beyond 0.05 of a corner are (1, 0.05)-strained");

  std::size_t corners = 0;
  for (const double delta : {0.05, 0.1, 0.3, 0.6, 1.0})
    for (const PointId c : sq.annotation.singular_ids)
      if (find_strainer(*sq.space, c, 1, delta, 0.03, 0.5)) ++corners;
  o.require(corners == 0, "corners strained at some delta <= 1.0: " + std::to_string(corners));

  std::vector<double> fractions;
  for (const double hh : {0.01, 0.005, 0.0025}) {
    const auto s = models::square(1.0, hh);
    fractions.push_back(
        regular_points(Subset::named(s.space, "boundary"), 1, {0.2, 0.1, 0.05}, 3 * hh, 6 * hh).fraction);
  }
  o.require(fractions[0] < fractions[1] && fractions[1] < fractions[2],
            "regular fraction at h = 0.01, 0.005, 0.0025: " + f(fractions[0]) + ", " + f(fractions[1]) + ", " +
                f(fractions[2]));
  return o;
}

// --- 5 ---------------------------------------------------------------------

Outcome chart_distortion() {
  Outcome o;
  const double h = 0.001, ell = 0.2, delta = 0.3, radius = ell * delta;
  std::vector<Chart> family;
  double worst_open = 0.0;
  for (const int n : {25, 50, 100}) {
    const auto p = models::regular_polygon(n, 1.0, h, 0.0, {.interior = false});
    const auto e = Subset::named(p.space, "boundary");
    const auto s = find_strainer(*p.space, 0, 1, delta, ell, 2 * ell);
    if (!s) {
      o.require(false, "no strainer at the vertex of the " + std::to_string(n) + "-gon");
      return o;
    }
    family.push_back(build_chart(e, *s, radius));
    const auto mid = static_cast<PointId>(e.size() / static_cast<std::size_t>(n) / 2);
    const auto sm = find_strainer(*p.space, mid, 1, delta, ell, 2 * ell);
    if (!sm) {
      o.require(false, "no strainer at an edge midpoint of the " + std::to_string(n) + "-gon");
      return o;
    }
    worst_open = std::max(worst_open, openness_measure(build_chart(e, *sm, radius), e).eps_open);
  }
  const auto t = distortion_trend(family);
  o.require(t.extrinsic_strict && t.intrinsic_strict,
            "vertex-chart distortion n = 25, 50, 100: extrinsic " + f(t.extrinsic[0]) + ", " + f(t.extrinsic[1]) +
                ", " + f(t.extrinsic[2]) + "; intrinsic " + f(t.intrinsic[0]) + ", " + f(t.intrinsic[1]) + ", " +
                f(t.intrinsic[2]));
  const double bound = 3 * (2 * pi / 100) + 4 * h / radius;
  o.require(std::max(t.extrinsic[2], t.intrinsic[2]) <= bound, "n = 100 within " + f(bound));
  const double ob = 0.05 + 4 * h / ell;
  o.require(worst_open <= ob, "edge-interior openness " + f(worst_open) + " (<= " + f(ob) + ")");
  return o;
}

// --- 6 ---------------------------------------------------------------------

Outcome metric_comparison_check() {
  Outcome o;
  const double h = 0.005, radius = 0.1;
  const auto sq = models::square(1.0, h);
  const auto e = Subset::named(sq.space, "boundary");
  double edge = 0.0;
  for (const auto& [x, y] : {std::pair{0.5, 0.0}, {1.0, 0.3}, {0.7, 1.0}, {0.0, 0.5}})
    edge = std::max(edge, metric_comparison(e, near(*sq.space, x, y), radius).max_ratio);
  const double eb = 1 + 4 * h / radius;
  o.require(edge <= eb, "edge-interior d_E/d " + f(edge) + " (<= " + f(eb) + ")");
  double corner = kInf;
  for (const PointId c : sq.annotation.singular_ids)
    corner = std::min(corner, metric_comparison(e, c, radius).max_ratio);
  o.require(corner >= 1.3, "corner d_E/d " + f(corner) + " (>= 1.3, analytic sqrt 2)");

  const auto b = models::square(1.0, h, {.interior = false});
  const auto eb2 = Subset::named(b.space, "boundary");
  const double ext = hausdorff_measure_estimate(eb2, 1, 0.02, MetricKind::extrinsic).value;
  const double in = hausdorff_measure_estimate(eb2, 1, 0.02, MetricKind::intrinsic).value;
  o.require(std::abs(in - ext) <= 0.05 * ext, "measure extrinsic " + f(ext) + ", intrinsic " + f(in) + " (within 5%)");
  return o;
}

// --- 7 ---------------------------------------------------------------------

Outcome quasigeodesics() {
  Outcome o;
  const double h = 0.01;
  const auto sq = models::square(1.0, h);
  const auto e = Subset::named(sq.space, "boundary");
  Curve path{e.intrinsic_path(near(*sq.space, 0.5, 0.0), near(*sq.space, 0.0, 0.5)), 0.0,
             CurveKind::intrinsic_geodesic};
  for (std::size_t i = 1; i < path.points.size(); ++i)
    path.step = std::max(path.step, sq.space->dist(path.points[i - 1], path.points[i]));
  double worst = 0.0;
  int views = 0;
  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= 2; ++j) {
      const PointId v = near(*sq.space, 0.15 * i, 0.3 * j);
      worst = std::max(worst, quasigeodesic_check(*sq.space, path, v).violation);
      ++views;
    }
  const double bound = 1e-6 + 4 * h;
  o.require(worst <= bound, "corner-turning boundary geodesic, " + std::to_string(views) + " viewpoints, violation " +
                                f(worst, 3) + " (<= " + f(bound) + ")");

  std::vector<double> zz;
  for (int i = 0; i < 20; ++i) zz.insert(zz.end(), {0.05 * i, (i % 2) * 0.05});
  zz.insert(zz.end(), {0.5, 0.5});
  const Space zig = Space::euclidean("zigzag", 2, zz);
  Curve zc;
  for (PointId i = 0; i < 20; ++i) zc.points.push_back(i);
  zc.step = zig.dist(0, 1);
  const double zv = quasigeodesic_check(zig, zc, 20).violation;
  o.require(zv > 0.1, "zigzag violation " + f(zv) + " (> 0.1)");
  return o;
}

// --- 8 ---------------------------------------------------------------------

Outcome gradient_invariance() {
  Outcome o;
  const double h = 0.01;
  const auto sq = models::square(1.0, h, {.planted = {{{0.2, 0.2}, {0.8, 0.8}, "diagonal"}}});
  const PointId q = near(*sq.space, 0.5, 0.35);
  const FlowConfig cfg{.step = 2 * h, .witness_radius = 3 * h, .max_steps = 100, .stop_threshold = 0.1};
  auto starts = [](const Subset& e, std::size_t off) {
    std::vector<PointId> s;
    for (std::size_t i = 0; i < 20; ++i) s.push_back(e.id((i * e.size() / 20 + off) % e.size()));
    return s;
  };
  const auto boundary = Subset::named(sq.space, "boundary");
  const auto b = extremal_invariance_test(boundary, q, starts(boundary, 3), cfg);
  std::size_t stalls = 0;
  for (const auto& s : b.stalls) stalls += !s.empty();
  o.require(b.max_deviation <= 3 * h && stalls == 0,
            "20 boundary curves, max deviation " + f(b.max_deviation) + " (<= " + f(3 * h) + ")");
  const auto diagonal = Subset::named(sq.space, "diagonal");
  const auto d = extremal_invariance_test(diagonal, q, starts(diagonal, 0), cfg);
  double least = kInf;
  for (const double v : d.deviations) least = std::min(least, v);
  o.require(least > 10 * h, "20 diagonal curves, smallest deviation " + f(least) + " (> " + f(10 * h) + ")");
  return o;
}

// --- 9 ---------------------------------------------------------------------

Outcome unstrained_mass_trend() {
  Outcome o;
  const auto sq = models::square(1.0, 0.005);
  const auto e = Subset::named(sq.space, "boundary");
  double prev = kInf;
  bool ok = true;
  std::string values;
  for (const double ell : {0.08, 0.04, 0.02}) {
    const double v = unstrained_mass(e, 1, 1, 0.1, ell, 0.02, 2 * ell).value;
    ok = ok && v <= 16 * ell && v <= prev;
    prev = v;
    values += (values.empty() ? "" : ", ") + f(v) + " (<= " + f(16 * ell) + ")";
  }
  o.require(ok, "unstrained mass at ell = 0.08, 0.04, 0.02: " + values);
  return o;
}

// --- 10 --------------------------------------------------------------------

Outcome glue_projection() {
  Outcome o;
  const double h = 0.001, r = 0.015;
  const auto p = models::regular_polygon(100, 1.0, h, 0.0, {.interior_h = h, .band = 0.003});
  const auto e = Subset::named(p.space, "boundary");
  const auto map = build_projection(e, 1, 0.3, 0.2, r);
  const auto& q = map.quality;
  o.require((3 + 2 * std::sqrt(1.0)) * map.rho < r, "rho " + f(map.rho) + ", (3 + 2 sqrt 1) rho < r");
  o.require(q.identity_on_subset, "f on E is the identity");
  o.require(q.displacement_excess < 0.0,
            "max d(x, fx) - 2 d(x, E) - 4h = " + f(q.displacement_excess, 3) + " over " +
                std::to_string(map.domain.size()) + " collar points");
  o.require(q.lip <= 1.2, "Lipschitz " + f(q.lip) + " (<= 1.2)");
  o.require(q.colip >= 0.8, "co-Lipschitz " + f(q.colip) + " (>= 0.8)");
  o.require(q.claim1 <= 0.2, "chart discrepancy / r " + f(q.claim1) + " (<= 0.2)");
  return o;
}

// --- 11 --------------------------------------------------------------------

Outcome volume_convergence() {
  Outcome o;
  const double h = 0.002, eps = 0.01;
  std::vector<FamilyMember> family;
  for (const int n : {8, 16, 32, 64, 128}) {
    const auto p = models::regular_polygon(n, 1.0, h, 0.0, {.interior = false});
    family.push_back({std::to_string(n) + "-gon", Subset::named(p.space, "boundary"),
                      p.annotation.exact_measure.at("boundary")});
  }
  const auto t = volume_convergence_experiment(family, 1, eps, 2 * pi);
  double worst = 0.0;
  for (const auto& row : t.rows)
    worst = std::max({worst, std::abs(row.extrinsic / *row.exact - 1), std::abs(row.intrinsic / *row.exact - 1)});
  o.require(worst <= 0.02, "worst relative error against 2n sin(pi/n) " + f(worst, 3) + " (<= 0.02)");
  std::string devs;
  for (const auto& row : t.rows) devs += (devs.empty() ? "" : ", ") + f(row.deviation, 3);
  o.require(t.eventually_decreasing, "deviation from 2 pi: " + devs);

  std::vector<FamilyMember> shrinking;
  for (const double side : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
    const auto s = models::square(side, h, {.interior = false});
    shrinking.push_back({"square " + f(side), Subset::named(s.space, "boundary"), 4 * side});
  }
  const auto c = volume_convergence_experiment(shrinking, 1, eps, 4.0);
  o.require(c.collapse, "shrinking squares flagged as collapsing (last estimate " + f(c.rows.back().extrinsic) + ")");
  return o;
}

// --- 12 --------------------------------------------------------------------

Outcome cross_space() {
  Outcome o;
  const double h = 0.002, r = 0.015, delta = 0.3, ell = 0.2;
  const auto a = models::regular_polygon(100, 1.0, h, 0.0, {.interior = false});
  const auto e = Subset::named(a.space, "boundary");
  const std::vector<PointId> same(e.indices().begin(), e.indices().end());
  {
    const auto b = models::regular_polygon(100, 1.0, h, 0.0, {.interior = false});
    const auto res = cross_space_almost_isometry(e, Subset::named(b.space, "boundary"), same, 1, delta, ell, r);
    o.require(res.distortion <= 2 * h / r, "identity pairing distortion " + f(res.distortion, 3) + " (<= " +
                                               f(2 * h / r) + ")");
  }
  std::vector<double> ratios;
  for (const double eps : {0.01, 0.005}) {
    const auto b = models::regular_polygon(100, 1.0, h, eps, {.interior = false});
    const auto fb = Subset::named(b.space, "boundary");
    // rotation pairing: the i-th sample of E goes to the i-th sample of the rotated copy
    const auto res = cross_space_almost_isometry(e, fb, same, 1, delta, ell, r);
    ratios.push_back(res.displacement / eps);
    o.require(res.distortion <= 0.1, "rotation " + f(eps) + ": distortion " + f(res.distortion, 3) +
                                         ", displacement/eps " + f(ratios.back(), 3));
  }
  const double spread = std::abs(ratios[0] - ratios[1]);
  o.require(spread <= 0.5 * std::max({1.0, ratios[0], ratios[1]}),
            "displacement/eps stable across eps (difference " + f(spread, 3) + ")");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"comparison angle round trip", kplane_round_trip},
      {"extremality witness test", extremality},
      {"dimension equals strainer number", dimension},
      {"regular point classification", regular_points_trend},
      {"chart almost isometry", chart_distortion},
      {"intrinsic vs extrinsic metric", metric_comparison_check},
      {"quasigeodesic monotonicity", quasigeodesics},
      {"gradient flow invariance", gradient_invariance},
      {"unstrained mass", unstrained_mass_trend},
      {"glued projection", glue_projection},
      {"volume convergence", volume_convergence},
      {"cross-space almost isometry", cross_space},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !out.pass;
    std::printf("criterion %2zu %s  %s: %s (%.1fs)\n", i + 1, out.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
