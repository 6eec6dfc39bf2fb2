#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "alexkit/error.hpp"
#include "alexkit/kplane.hpp"
#include "oracles.hpp"

using namespace alexkit;
using kplane::comparison_angle;
using kplane::Degenerate;
using kplane::side_from_angle;
constexpr double pi = std::numbers::pi;

TEST_SUITE("kplane") {
  TEST_CASE("textbook triangles") {
    CHECK(comparison_angle(0, 1, 1, 1) == doctest::Approx(pi / 3).epsilon(1e-14));
    CHECK(comparison_angle(0, 3, 4, 5) == doctest::Approx(pi / 2).epsilon(1e-14));
    CHECK(comparison_angle(1, pi / 2, pi / 2, pi / 2) == doctest::Approx(pi / 2).epsilon(1e-14));
    CHECK(side_from_angle(0, 3, 4, pi / 2) == doctest::Approx(5).epsilon(1e-14));
    CHECK(side_from_angle(0, 1, 1, pi) == doctest::Approx(2).epsilon(1e-14));
    CHECK(side_from_angle(1, pi / 2, pi / 2, pi / 2) == doctest::Approx(pi / 2).epsilon(1e-14));
  }

  TEST_CASE("hyperbolic equilateral triangle against the hyperboloid model") {
    // unit sides: place q and r on the hyperboloid and read the angle off the tangent vectors
    const double c = std::cosh(1.0), s = std::sinh(1.0);
    const double expected = std::acos((c * c - c) / (s * s));
    CHECK(expected == doctest::Approx(0.918).epsilon(1e-3));
    CHECK(comparison_angle(-1, 1, 1, 1) == doctest::Approx(expected).epsilon(1e-13));
  }

  TEST_CASE("nonexistent triangles") {
    CHECK(comparison_angle(0, 1, 1, 3, Degenerate::zero) == 0.0);
    CHECK_THROWS_AS(comparison_angle(0, 1, 1, 3), NonexistenceError);
    try {
      comparison_angle(1, 2.5, 2.5, 2.5);
      FAIL("expected a nonexistence error");
    } catch (const NonexistenceError& e) {
      CHECK(e.condition().find("perimeter") != std::string::npos);
    }
    CHECK_THROWS_AS(comparison_angle(0, 0, 1, 1), UndefinedAngleError);
    CHECK_THROWS_AS(side_from_angle(1, 4.0, 1.0, 0.5), DomainError);
  }

  TEST_CASE("side_from_angle agrees with coordinates in each model plane") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> len(0.05, 1.4), ang(0.01, pi - 0.01);
    for (const double kappa : {-1.0, 0.0, 1.0}) {
      for (int i = 0; i < 300; ++i) {
        const double l1 = len(rng), l2 = len(rng), a = ang(rng);
        const auto q = oracle::model_point(kappa, l1, 0.0);
        const auto r = oracle::model_point(kappa, l2, a);
        const double qr = oracle::model_distance(kappa, q, r);
        CHECK(side_from_angle(kappa, l1, l2, a) == doctest::Approx(qr).epsilon(1e-10));
        CHECK(comparison_angle(kappa, l1, l2, qr) == doctest::Approx(a).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("symmetry, monotonicity and continuity in kappa") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> len(0.1, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double a = len(rng), b = len(rng);
      const double lo = std::abs(a - b), hi = a + b;
      const double c = lo + (hi - lo) * 0.5;
      CHECK(comparison_angle(0, a, b, c) == comparison_angle(0, b, a, c));
      const double e = (hi - lo) * 1e-3;
      CHECK(comparison_angle(0, a, b, c + e) > comparison_angle(0, a, b, c));
      CHECK(std::abs(comparison_angle(1e-6, a, b, c) - comparison_angle(0, a, b, c)) < 1e-5);
      CHECK(std::abs(comparison_angle(-1e-6, a, b, c) - comparison_angle(0, a, b, c)) < 1e-5);
    }
  }

  TEST_CASE("flat triangles are handled without noise") {
    CHECK(comparison_angle(0, 1, 2, 3) == doctest::Approx(pi).epsilon(1e-12));
    CHECK(comparison_angle(0, 1, 2, 1) == doctest::Approx(0.0));
    CHECK(comparison_angle(1, 1, 2, 3) == doctest::Approx(pi).epsilon(1e-12));
    CHECK(kplane::model_diameter(4.0) == doctest::Approx(pi / 2));
    CHECK(std::isinf(kplane::model_diameter(0.0)));
  }
}
