#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <numbers>

#include "alexkit/charts.hpp"
#include "alexkit/error.hpp"
#include "alexkit/models.hpp"

using namespace alexkit;
constexpr double pi = std::numbers::pi;

namespace {

PointId near(const Space& s, double x, double y) {
  PointId best = 0;
  double bd = kInf;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = s.coord(static_cast<PointId>(i));
    const double d = std::hypot(c[0] - x, s.dim() > 1 ? c[1] - y : 0.0);
    if (d < bd) bd = d, best = static_cast<PointId>(i);
  }
  return best;
}

Curve polyline(std::vector<PointId> pts, const Space& s) {
  Curve c;
  for (std::size_t i = 1; i < pts.size(); ++i) c.step = std::max(c.step, s.dist(pts[i - 1], pts[i]));
  c.points = std::move(pts);
  return c;
}

}  // namespace

TEST_SUITE("charts") {
  TEST_CASE("chart on one straight edge is an isometry") {
    const double h = 0.01;
    const auto sq = models::square(1.0, h, {.interior = false});
    const auto e = Subset::named(sq.space, "boundary");
    const PointId mid = near(*sq.space, 0.5, 0.0);
    const auto st = find_strainer(*sq.space, mid, 1, 0.1, 0.2, 0.4);
    REQUIRE(st.has_value());
    const auto chart = build_chart(e, *st, 0.1);
    CHECK(chart.extrinsic.distortion < 1e-9);
    CHECK(chart.intrinsic.distortion < 1e-9);
    // extrinsic and intrinsic agree on a flat stratum
    CHECK(std::abs(chart.extrinsic.lip - chart.intrinsic.lip) < 1e-12);

    const auto open = openness_measure(chart, e);
    CHECK(open.eps_open <= 0.05 + 4 * h / 0.2);
  }

  TEST_CASE("each chart coordinate is 1-Lipschitz") {
    const auto sq = models::square(1.0, 0.05);
    const auto whole = Subset::whole(sq.space);
    const PointId c = near(*sq.space, 0.5, 0.5);
    const auto st = find_strainer(*sq.space, c, 2, 0.1, 0.1, 0.4);
    REQUIRE(st.has_value());
    const auto chart = build_chart(whole, *st, 0.3, {.intrinsic = false});
    const std::size_t k = chart.k();
    for (std::size_t i = 0; i < chart.region.size(); ++i)
      for (std::size_t j = 0; j < chart.region.size(); ++j)
        for (std::size_t a = 0; a < k; ++a)
          // exact up to the rounding of one subtraction
          CHECK(std::abs(chart.values[i * k + a] - chart.values[j * k + a]) <=
                sq.space->dist(chart.region[i], chart.region[j]) * (1.0 + 4 * DBL_EPSILON));
  }

  TEST_CASE("openness on a segment") {
    const auto seg = models::segment(1.0, 0.01);
    const auto e = Subset::named(seg.space, "segment");
    Strainer mid{.base = 50, .pairs = {{20, 80}}};
    CHECK(openness_measure(build_chart(e, mid, 0.1), e).eps_open < 1e-9);
    Strainer end{.base = 0, .pairs = {{50, 100}}};
    CHECK(openness_measure(build_chart(e, end, 0.1), e).eps_open == doctest::Approx(2.0));
    CHECK(direction_grid(1, 8).size() == 2);
    CHECK(direction_grid(2, 8).size() == 8);
  }

  TEST_CASE("chart across a 100-gon corner") {
    const int n = 100;
    const double h = 0.002, radius = 0.05;
    const auto poly = models::regular_polygon(n, 1.0, h, 0.0, {.interior = false});
    const auto e = Subset::named(poly.space, "boundary");
    // inscribed angle at a vertex is pi minus the arc out to the witnesses, so
    // they sit between the chart radius and delta
    const auto st = find_strainer(*poly.space, 0, 1, 0.1, 0.06, 0.095);
    REQUIRE(st.has_value());
    REQUIRE(st->length > radius);
    const auto chart = build_chart(e, *st, radius);
    CHECK(chart.intrinsic.distortion <= 3 * (2 * pi / n) + 4 * h / radius);
  }

  TEST_CASE("metric comparison") {
    const double h = 0.01;
    const auto sq = models::square(1.0, h, {.interior = false});
    const auto e = Subset::named(sq.space, "boundary");
    CHECK(std::abs(metric_comparison(e, near(*sq.space, 0.5, 0), 0.1).max_ratio - 1.0) <= 2 * h / 0.1);
    const auto corner = metric_comparison(e, near(*sq.space, 0, 0), 0.1);
    CHECK(corner.max_ratio >= 1.3);
    CHECK(corner.max_ratio <= std::sqrt(2.0) + 1e-9);
    CHECK_THROWS_AS(metric_comparison(e, 0, 2 * h), RefusalError);

    const auto filled = models::square(1.0, 0.05);
    const auto whole = Subset::whole(filled.space, 0.11);
    CHECK(metric_comparison(whole, near(*filled.space, 0.5, 0.5), 0.3).max_ratio <= 1.0 + 4 * 0.05 / 0.3);
  }

  TEST_CASE("quasigeodesic monotonicity") {
    // a straight chord with an off-line viewpoint
    std::vector<double> xy;
    for (int i = 0; i <= 40; ++i) xy.insert(xy.end(), {0.1 + 0.02 * i, 0.2 + 0.01 * i});
    xy.insert(xy.end(), {0.5, 0.9});
    const Space line = Space::euclidean("chord", 2, xy);
    std::vector<PointId> ids(41);
    for (int i = 0; i <= 40; ++i) ids[static_cast<std::size_t>(i)] = i;
    CHECK(quasigeodesic_check(line, polyline(ids, line), 41).violation <= 1e-9);
    CHECK_THROWS_AS(quasigeodesic_check(line, polyline(ids, line), 3), RefusalError);

    const double h = 0.01;
    const auto sq = models::square(1.0, h);
    const auto e = Subset::named(sq.space, "boundary");
    const auto path = e.intrinsic_path(near(*sq.space, 0.5, 0), near(*sq.space, 0, 0.5));
    REQUIRE(path.size() > 10);
    const auto curve = polyline(path, *sq.space);
    for (const auto& [x, y] : {std::pair{0.5, 0.5}, {0.2, 0.3}, {0.7, 0.6}})
      CHECK(quasigeodesic_check(*sq.space, curve, near(*sq.space, x, y)).violation <= 1e-6 + 4 * h);

    std::vector<double> zz;
    for (int i = 0; i < 20; ++i) zz.insert(zz.end(), {0.05 * i, (i % 2) * 0.05});
    zz.insert(zz.end(), {0.5, 0.5});
    const Space zig = Space::euclidean("zigzag", 2, zz);
    std::vector<PointId> zids(20);
    for (int i = 0; i < 20; ++i) zids[static_cast<std::size_t>(i)] = i;
    CHECK(quasigeodesic_check(zig, polyline(zids, zig), 20).violation > 0.1);
  }

  TEST_CASE("distortion trend") {
    std::vector<Chart> flat;
    for (const double h : {0.02, 0.01, 0.005}) {
      const auto seg = models::segment(1.0, h);
      const auto e = Subset::named(seg.space, "segment");
      const auto mid = static_cast<PointId>(std::lround(0.5 / h));
      Strainer s{.base = mid, .pairs = {{0, static_cast<PointId>(seg.space->size() - 1)}}};
      flat.push_back(build_chart(e, s, 0.2));
    }
    const auto t = distortion_trend(flat);
    for (const double d : t.extrinsic) CHECK(d < 1e-9);
    CHECK(t.extrinsic_nonincreasing);
    flat.pop_back();
    CHECK_THROWS_AS(distortion_trend(flat), RefusalError);
  }
}
