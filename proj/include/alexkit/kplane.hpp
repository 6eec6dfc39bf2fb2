#pragma once

#include <string>

namespace alexkit::kplane {

/// What to do when no comparison triangle exists.
enum class Degenerate {
  error,  ///< throw NonexistenceError
  zero,   ///< return 0 (the convention for curve-based comparison angles)
};

/// Side lengths of a triangle in the plane of constant curvature `kappa`.
///
/// `pq` and `pr` are adjacent to the vertex p, `qr` is opposite to it.
struct KappaTriangle {
  double kappa = 0.0;
  double pq = 0.0;
  double pr = 0.0;
  double qr = 0.0;

  /// Triangle inequality, plus side and perimeter bounds when kappa > 0.
  bool exists() const;

  /// Human-readable name of the first violated existence condition, or "" if
  /// the triangle exists.
  std::string violated_condition() const;
};

/// Diameter of the model plane: pi/sqrt(kappa) for kappa > 0, infinity otherwise.
double model_diameter(double kappa);

/// Generalized sine s_kappa(x): sin(sqrt(k) x)/sqrt(k), x, or sinh(sqrt(-k) x)/sqrt(-k).
double sn(double kappa, double x);

/// Angle at p, in [0, pi], of the comparison triangle.
///
/// Throws UndefinedAngleError if an adjacent side is zero, and
/// NonexistenceError if the triangle does not exist and mode is `error`.
double comparison_angle(const KappaTriangle& tri, Degenerate mode = Degenerate::error);

/// Convenience overload: angle between sides `adjacent1` and `adjacent2`
/// opposite to `opposite`.
inline double comparison_angle(double kappa, double adjacent1, double adjacent2, double opposite,
                               Degenerate mode = Degenerate::error) {
  return comparison_angle(KappaTriangle{kappa, adjacent1, adjacent2, opposite}, mode);
}

/// Third side of the triangle with sides l1, l2 enclosing `angle` (inverse law
/// of cosines). Throws DomainError outside the model domain.
double side_from_angle(double kappa, double l1, double l2, double angle);

}  // namespace alexkit::kplane
