#include <doctest.h>

#include <cmath>
#include <numbers>

#include "alexkit/error.hpp"
#include "alexkit/flow.hpp"
#include "alexkit/models.hpp"
#include "oracles.hpp"

using namespace alexkit;

namespace {

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

std::vector<PointId> spread(const Subset& e, std::size_t count, std::size_t offset) {
  std::vector<PointId> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(e.id((i * e.size() / count + offset) % e.size()));
  return out;
}

}  // namespace

TEST_SUITE("flow") {
  TEST_CASE("directional derivatives in the plane") {
    const Space s = Space::euclidean("plane", 2, {0, 0, 1, 0, 2, 0, 0.5, 0, 1.01, 0.1});
    CHECK(directional_derivative(s, 0, 1, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(directional_derivative(s, 0, 1, 3) == doctest::Approx(-1.0).epsilon(1e-14));
    // angle at x between the directions to q and to w
    const double expected = -std::cos(oracle::planar_angle(-1, 0, 0.01, 0.1));
    CHECK(expected == doctest::Approx(0.0995).epsilon(1e-3));
    CHECK(directional_derivative(s, 0, 1, 4) == doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(directional_derivative(s, 1, 1, 2), UndefinedAngleError);
  }

  TEST_CASE("config checks") {
    const auto sq = models::square(1.0, 0.02);
    CHECK_THROWS_AS(validate_flow_config(*sq.space, {.step = 0.02, .witness_radius = 0.06}), RefusalError);
    CHECK_THROWS_AS(validate_flow_config(*sq.space, {.step = 0.04, .witness_radius = 0.03}), RefusalError);
    CHECK_NOTHROW(validate_flow_config(*sq.space, {.step = 0.04, .witness_radius = 0.06}));
  }

  TEST_CASE("gradient curves ascend and are reproducible") {
    const double h = 0.02;
    const auto sq = models::square(1.0, h);
    const Space& s = *sq.space;
    const PointId q = near(s, 0.5, 0.5);
    const FlowConfig cfg{.step = 2 * h, .witness_radius = 3 * h, .max_steps = 100, .stop_threshold = 0.1};
    const auto g = gradient_curve(s, q, near(s, 0.6, 0.55), cfg);
    REQUIRE(g.curve.points.size() > 3);
    for (std::size_t i = 1; i < g.curve.points.size(); ++i) {
      const double rise = s.dist(q, g.curve.points[i]) - s.dist(q, g.curve.points[i - 1]);
      CHECK(rise >= cfg.stop_threshold * cfg.step * 0.5);
    }
    const auto again = gradient_curve(s, q, near(s, 0.6, 0.55), cfg);
    CHECK(again.curve.points == g.curve.points);
    CHECK(again.derivatives == g.derivatives);

    const auto corner = gradient_curve(s, q, near(s, 0, 0), cfg);
    CHECK(corner.curve.points.size() == 1);
    CHECK(corner.stopped_critical);
    CHECK_THROWS_AS(gradient_curve(s, q, q, cfg), RefusalError);
  }

  TEST_CASE("a stall is reported") {
    const Space s = Space::euclidean("sparse", 1, {0, 1, 5}, 0.0, 0.1);
    CHECK_THROWS_AS(gradient_curve(s, 0, 1, {.step = 0.2, .witness_radius = 0.3}), StalledError);
  }

  TEST_CASE("pillow corner is critical for a nearby viewpoint") {
    const double h = 0.05;
    const auto p = models::pillow(1.0, h);
    const Space& s = *p.space;
    // the interior point closest to (0.3, 0.3) on the first sheet
    PointId q = -1;
    double bd = kInf;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto c = s.coord(static_cast<PointId>(i));
      if (c[2] != 1.0) continue;
      const double d = std::hypot(c[0] - 0.3, c[1] - 0.3);
      if (d < bd) bd = d, q = static_cast<PointId>(i);
    }
    const PointId corner = s.subset("corner0").indices[0];
    const auto g = gradient_curve(s, q, corner, {.step = 2 * h, .witness_radius = 3 * h});
    CHECK(g.stopped_critical);
    CHECK(g.curve.points.size() == 1);
  }

  TEST_CASE("extremal subsets are invariant, a planted diagonal is not") {
    const double h = 0.01;
    const auto sq = models::square(1.0, h, {.planted = {{{0.2, 0.2}, {0.8, 0.8}, "diagonal"}}});
    const Space& s = *sq.space;
    const PointId q = near(s, 0.5, 0.35);
    const FlowConfig cfg{.step = 2 * h, .witness_radius = 3 * h, .max_steps = 100};
    const auto boundary = Subset::named(sq.space, "boundary");
    const auto inv = extremal_invariance_test(boundary, q, spread(boundary, 20, 3), cfg);
    CHECK(inv.max_deviation <= 3 * h);
    for (const auto& st : inv.stalls) CHECK(st.empty());

    const auto diagonal = Subset::named(sq.space, "diagonal");
    const auto off = extremal_invariance_test(diagonal, q, spread(diagonal, 20, 0), cfg);
    CHECK(off.max_deviation > 10 * h);

    const auto whole = Subset::whole(sq.space);
    CHECK(extremal_invariance_test(whole, q, {near(s, 0.7, 0.7)}, cfg).max_deviation == 0.0);
  }

  TEST_CASE("gradient lower bound of the distance to the boundary") {
    const double h = 0.02;
    const auto sq = models::square(1.0, h);
    const auto boundary = Subset::named(sq.space, "boundary");
    const FlowConfig cfg{.step = 2 * h, .witness_radius = 3 * h};
    const auto band = dist_gradient_lower_bound(boundary, 0.05, 0.2, cfg);
    CHECK(band.band_points > 0);
    CHECK(band.epsilon >= 0.9);
    CHECK_FALSE(band.critical);
    CHECK_THROWS_AS(dist_gradient_lower_bound(Subset::whole(sq.space), 0.05, 0.2, cfg), RefusalError);
  }

  TEST_CASE("the bound drops on the cut locus of the boundary") {
    // a square grid holds the centre and the diagonals, where the nearest
    // boundary point is not unique
    const int n = 50;
    const double h = 1.0 / n;
    std::vector<double> xy;
    std::vector<PointId> edge;
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        if (i == 0 || j == 0 || i == n || j == n) edge.push_back(static_cast<PointId>(xy.size() / 2));
        xy.insert(xy.end(), {i * h, j * h});
      }
    auto grid = std::make_shared<const Space>(Space::euclidean("grid", 2, xy, 0.0, h));
    const Subset boundary(grid, edge, 3 * h);
    const FlowConfig cfg{.step = 2 * h, .witness_radius = 3 * h};
    const auto near_edges = dist_gradient_lower_bound(boundary, 0.05, 0.2, cfg);
    // on a corner bisector the best ascent makes 45 degrees with both feet
    CHECK(near_edges.epsilon == doctest::Approx(std::cos(std::numbers::pi / 4)).epsilon(0.05));
    const auto centre = dist_gradient_lower_bound(boundary, 0.05, 0.5, cfg);
    CHECK(centre.epsilon < near_edges.epsilon);
    CHECK(centre.critical);
  }
}
