#pragma once

#include <optional>
#include <vector>

#include "alexkit/space.hpp"

namespace alexkit {

struct ExtremalityOptions {
  double witness_radius = 0.0;
  std::optional<double> angle_tol;  ///< default 0.05 + 2h / witness_radius
  int max_exterior = 48;            ///< exterior viewpoints, spread evenly over candidates
};

struct ExtremalityReport {
  bool passed = true;
  double angle_tol = 0.0;
  double witness_radius = 0.0;
  double worst_excess = -kInf;   ///< max over checks of angle - pi/2
  PointId worst_q = -1, worst_p = -1, worst_w = -1;
  int exterior_points = 0;
  int local_minima = 0;
  std::int64_t witnesses_checked = 0;
};

/// Witness test of Definition-style extremality: at each local minimum p of
/// dist_q on the subset (local in the link graph), every witness w with
/// d(p, w) <= witness_radius must satisfy comparison angle q p w <= pi/2 + tol.
/// Exterior points q are taken at distance >= witness_radius from the subset.
ExtremalityReport extremality_check(const Subset& subset, const ExtremalityOptions& opt);

}  // namespace alexkit
