#pragma once

// Discrete gradient curves of distance functions.

#include <string>
#include <vector>

#include "alexkit/space.hpp"

namespace alexkit {

struct FlowConfig {
  double step = 0.0;
  double witness_radius = 0.0;  ///< moves go to points with step <= d <= min(witness_radius, 1.5 step)
  int max_steps = 100;
  double stop_threshold = 0.1;  ///< stop once the best directional derivative is <= this
};

/// Checks step >= 2h and witness_radius >= step; throws RefusalError otherwise.
void validate_flow_config(const Space& space, const FlowConfig& cfg);

/// -cos of the comparison angle q x w: the witness estimate of the derivative
/// of dist_q at x in the direction of w.
double directional_derivative(const Space& space, PointId q, PointId x, PointId w);

struct GradientCurve {
  Curve curve;
  std::vector<double> derivatives;  ///< best derivative found at each visited point
  bool stopped_critical = false;    ///< ended because the point looked critical
};

GradientCurve gradient_curve(const Space& space, PointId q, PointId x0, const FlowConfig& cfg);

struct InvarianceResult {
  double max_deviation = 0.0;
  std::vector<double> deviations;  ///< per start
  std::vector<GradientCurve> curves;
  std::vector<std::string> stalls;  ///< "" when the curve ran normally
};

/// Runs gradient curves of dist_q from each start and measures how far they
/// get from the subset.
InvarianceResult extremal_invariance_test(const Subset& subset, PointId q, const std::vector<PointId>& starts,
                                          const FlowConfig& cfg);

struct GradientBound {
  double epsilon = 0.0;  ///< min over band points of the best derivative of dist_E
  PointId argmin = -1;
  std::int64_t band_points = 0;
  bool critical = false;  ///< epsilon <= stop_threshold: the band reaches a critical point of dist_E
};

/// Gradient lower bound of dist_E on {x : inner <= d(x, E) <= outer}. The
/// derivative of dist_E toward w is the min over the nearest points e (ties up
/// to rounding) of -cos angle~ e x w.
GradientBound dist_gradient_lower_bound(const Subset& subset, double inner, double outer, const FlowConfig& cfg);

}  // namespace alexkit
