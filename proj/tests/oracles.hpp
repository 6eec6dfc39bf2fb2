#pragma once

// Independent reference computations used by the unit tests. Nothing here
// calls into the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace oracle {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Point at distance s from the base point of the model plane, in direction phi.
// kappa = 1: unit sphere in R^3, base (0,0,1). kappa = -1: hyperboloid
// x0^2 - x1^2 - x2^2 = 1 stored as (x1, x2, x0). kappa = 0: the plane.
inline Vec3 model_point(double kappa, double s, double phi) {
  if (kappa > 0) return {std::sin(s) * std::cos(phi), std::sin(s) * std::sin(phi), std::cos(s)};
  if (kappa < 0) return {std::sinh(s) * std::cos(phi), std::sinh(s) * std::sin(phi), std::cosh(s)};
  return {s * std::cos(phi), s * std::sin(phi), 0.0};
}

inline double model_distance(double kappa, const Vec3& a, const Vec3& b) {
  if (kappa > 0) {
    const Vec3 c{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    return std::atan2(std::sqrt(dot(c, c)), dot(a, b));
  }
  if (kappa < 0) return std::acosh(std::max(1.0, a[2] * b[2] - a[0] * b[0] - a[1] * b[1]));
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

// Angle at the origin of the plane between (x1, y1) and (x2, y2).
inline double planar_angle(double x1, double y1, double x2, double y2) {
  return std::atan2(std::abs(x1 * y2 - y1 * x2), x1 * x2 + y1 * y2);
}

}  // namespace oracle
