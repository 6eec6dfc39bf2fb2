#pragma once

// Strainer distance-map charts and the measurements taken on them.

#include <optional>
#include <string>
#include <vector>

#include "alexkit/measure.hpp"
#include "alexkit/space.hpp"
#include "alexkit/strainers.hpp"

namespace alexkit {

/// Distribution of |f(x) - f(y)| / d(x, y) over region pairs.
struct RatioStats {
  double lip = 0.0;        ///< max ratio
  double colip = 0.0;      ///< min ratio
  double max_ratio = 0.0;  ///< 99th percentile
  double min_ratio = 0.0;  ///< 1st percentile
  double median = 0.0;
  double distortion = 0.0;  ///< max |ratio - 1|
  std::int64_t pairs = 0;
  std::int64_t skipped = 0;  ///< pairs at infinite intrinsic distance
  bool defined = false;
};

struct Chart {
  Strainer strainer;
  double radius = 0.0;
  std::vector<PointId> region;
  std::vector<double> values;  ///< row-major |region| x k: values[i*k + j] = d(a_j, region[i])
  RatioStats extrinsic;
  RatioStats intrinsic;

  std::size_t k() const { return strainer.k(); }
  std::vector<PointId> anchors() const;  ///< a_1..a_k
};

struct ChartOptions {
  bool intrinsic = true;
};

/// Chart of f = (|a_1 .|, ..., |a_k .|) on subset ∩ B(base, radius).
Chart build_chart(const Subset& subset, const Strainer& strainer, double radius, const ChartOptions& opt = {});

/// f evaluated at any point of the space.
std::vector<double> chart_value(const Space& space, const std::vector<PointId>& anchors, PointId x);

/// Deterministic unit directions in R^k: {+1, -1} for k = 1, `grid` equal
/// angles for k = 2, a Fibonacci-style spread of grid^(k-1) points for k >= 3.
std::vector<std::vector<double>> direction_grid(std::size_t k, int grid);

struct Openness {
  double eps_open = 0.0;
  PointId worst_point = -1;
  std::vector<double> worst_direction;
  std::int64_t isolated = 0;  ///< region points with no neighbour, skipped
};

/// max over region points p and grid directions xi of min over nearby subset
/// points q of |(f(q) - f(p)) / d(p, q) - xi|, with q within the chart radius of p.
Openness openness_measure(const Chart& chart, const Subset& subset, int grid = 8);

struct MetricComparison {
  double max_ratio = 1.0;
  PointId a = -1, b = -1;
  std::int64_t pairs = 0;
};

/// max of d_E / d over pairs of subset ∩ B(p, radius).
MetricComparison metric_comparison(const Subset& subset, PointId p, double radius);

struct QuasigeodesicCheck {
  double violation = 0.0;  ///< largest increase of the comparison angle over its running minimum
  std::size_t at_start = 0, at_end = 0;
  std::int64_t angles = 0;
};

/// Monotonicity of tau -> angle~ p gamma(t) ⌣ gamma(t + tau) along a polyline,
/// with tau the arc length. Gaps must be positive and at most 1.5 * step.
QuasigeodesicCheck quasigeodesic_check(const Space& space, const Curve& path, PointId p);

struct DistortionTrend {
  std::vector<double> extrinsic;
  std::vector<double> intrinsic;
  bool extrinsic_nonincreasing = true;
  bool intrinsic_nonincreasing = true;
  bool extrinsic_strict = true;
  bool intrinsic_strict = true;
};

DistortionTrend distortion_trend(const std::vector<Chart>& family);

}  // namespace alexkit
