#include "alexkit/kplane.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "alexkit/error.hpp"

namespace alexkit::kplane {
namespace {

constexpr double kRelTol = 1e-12;

double tolerance(const KappaTriangle& t) { return kRelTol * std::max(1.0, t.pq + t.pr + t.qr); }

// Factors that must be nonnegative for the triangle to exist. Clamped to zero
// when they are negative only by rounding.
double clamp_factor(double v, double tol) { return (v < 0.0 && v >= -tol) ? 0.0 : v; }

}  // namespace

double model_diameter(double kappa) {
  if (kappa > 0.0) return std::numbers::pi / std::sqrt(kappa);
  return std::numeric_limits<double>::infinity();
}

double sn(double kappa, double x) {
  if (kappa > 0.0) {
    const double k = std::sqrt(kappa);
    return std::sin(k * x) / k;
  }
  if (kappa < 0.0) {
    const double k = std::sqrt(-kappa);
    return std::sinh(k * x) / k;
  }
  return x;
}

std::string KappaTriangle::violated_condition() const {
  if (!(pq >= 0.0 && pr >= 0.0 && qr >= 0.0)) return "negative side";
  if (!std::isfinite(pq) || !std::isfinite(pr) || !std::isfinite(qr)) return "non-finite side";
  const double tol = tolerance(*this);
  if (qr > pq + pr + tol) return "triangle inequality |qr| <= |pq| + |pr|";
  if (pq > pr + qr + tol) return "triangle inequality |pq| <= |pr| + |qr|";
  if (pr > pq + qr + tol) return "triangle inequality |pr| <= |pq| + |qr|";
  if (kappa > 0.0) {
    const double diam = model_diameter(kappa);
    if (std::max({pq, pr, qr}) > diam + tol) return "side length <= pi/sqrt(kappa)";
    if (pq + pr + qr > 2.0 * diam + tol) return "perimeter <= 2*pi/sqrt(kappa)";
  }
  return {};
}

bool KappaTriangle::exists() const { return violated_condition().empty(); }

double comparison_angle(const KappaTriangle& tri, Degenerate mode) {
  if (const auto why = tri.violated_condition(); !why.empty()) {
    if (mode == Degenerate::zero) return 0.0;
    throw NonexistenceError(why);
  }
  if (tri.pq == 0.0 || tri.pr == 0.0) {
    throw UndefinedAngleError("comparison angle undefined: zero-length adjacent side");
  }
  if (tri.kappa > 0.0) {
    const double diam = model_diameter(tri.kappa);
    if (tri.pq >= diam || tri.pr >= diam) {
      throw UndefinedAngleError("comparison angle undefined: adjacent side of length pi/sqrt(kappa)");
    }
  }
  const double a = tri.qr;
  // sorted so that swapping the adjacent sides gives the same bits
  const double b = std::min(tri.pq, tri.pr);
  const double c = std::max(tri.pq, tri.pr);
  const double tol = tolerance(tri);
  // Half-angle form: tan^2(alpha/2) = sn(x1) sn(x2) / (sn(y1) sn(y2)), which
  // stays accurate near alpha = 0 and alpha = pi for every sign of kappa.
  const double x1 = clamp_factor(0.5 * (a + b - c), tol);
  const double x2 = clamp_factor(0.5 * (a - b + c), tol);
  const double y1 = 0.5 * (a + b + c);
  const double y2 = clamp_factor(0.5 * (b + c - a), tol);
  const double k = tri.kappa;
  const double s = std::max(0.0, sn(k, x1) * sn(k, x2));
  const double co = std::max(0.0, sn(k, y1) * sn(k, y2));
  return 2.0 * std::atan2(std::sqrt(s), std::sqrt(co));
}

double side_from_angle(double kappa, double l1, double l2, double angle) {
  if (!(l1 >= 0.0 && l2 >= 0.0)) throw DomainError("side_from_angle: negative side");
  if (!(angle >= 0.0 && angle <= std::numbers::pi)) throw DomainError("side_from_angle: angle outside [0, pi]");
  const double half_sin = std::sin(0.5 * angle);
  const double half_cos = std::cos(0.5 * angle);
  if (kappa == 0.0) {
    const double d = l1 - l2;
    return std::sqrt(d * d + 4.0 * l1 * l2 * half_sin * half_sin);
  }
  if (kappa > 0.0) {
    const double diam = model_diameter(kappa);
    if (l1 > diam || l2 > diam) throw DomainError("side_from_angle: side exceeds pi/sqrt(kappa)");
    const double k = std::sqrt(kappa);
    // haversine law and its complement, combined through atan2
    const double sd = std::sin(0.5 * k * (l1 - l2));
    const double ss = std::cos(0.5 * k * (l1 + l2));
    const double prod = std::sin(k * l1) * std::sin(k * l2);
    const double h = sd * sd + prod * half_sin * half_sin;
    const double hc = ss * ss + prod * half_cos * half_cos;
    return 2.0 * std::atan2(std::sqrt(std::max(0.0, h)), std::sqrt(std::max(0.0, hc))) / k;
  }
  const double k = std::sqrt(-kappa);
  const double sd = std::sinh(0.5 * k * (l1 - l2));
  const double h = sd * sd + std::sinh(k * l1) * std::sinh(k * l2) * half_sin * half_sin;
  return 2.0 * std::asinh(std::sqrt(std::max(0.0, h))) / k;
}

}  // namespace alexkit::kplane
