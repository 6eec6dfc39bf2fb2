#pragma once

// Sanity validation of a sampled metric, packing numbers, and the
// packing-based Hausdorff measure and dimension estimators.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "alexkit/space.hpp"

namespace alexkit {

struct ValidationCheck {
  std::string name;
  bool passed = true;
  double worst = 0.0;             ///< size of the worst violation (0 when passed)
  std::vector<PointId> witness;   ///< offending pair or triple
  std::int64_t checked = 0;       ///< number of pairs/triples examined
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool exhaustive_triangles = true;
  bool ok() const;
};

/// Checks zero diagonal, symmetry, positivity, the triangle inequality
/// (exhaustive up to 300 points, else `random_triples` seeded samples) and,
/// for kappa > 0, the diameter bound.
ValidationReport validate(const Space& space, std::uint64_t seed = 1, std::int64_t random_triples = 100000);

enum class MetricKind { extrinsic, intrinsic };
const char* to_string(MetricKind k);

enum class PackingMode {
  greedy,       ///< id-order greedy, a lower bound
  farthest,     ///< farthest-point insertion, a lower bound
  exact,        ///< branch and bound, at most 25 points
};

struct PackingResult {
  std::int64_t count = 0;
  bool exact = false;              ///< false: count is a lower bound
  std::vector<PointId> centers;    ///< the eps-discrete set found, in selection order
};

/// Largest set found with pairwise distance > eps among `ids`.
PackingResult packing(const Space& space, std::span<const PointId> ids, double eps,
                      PackingMode mode = PackingMode::greedy);

/// Greedy packing of a subset under its intrinsic metric.
PackingResult intrinsic_packing(const Subset& subset, double eps);

inline std::int64_t packing_number(const Space& space, std::span<const PointId> ids, double eps,
                                   PackingMode mode = PackingMode::greedy) {
  return packing(space, ids, eps, mode).count;
}

/// Median nearest-neighbour distance within `ids` (0 for fewer than 2 points).
double measured_pitch(const Space& space, std::span<const PointId> ids);

struct MeasureEstimate {
  double value = 0.0;
  double c_m = 0.0;          ///< calibration constant used
  std::int64_t beta = 0;     ///< packing number of the subset
  double pitch = 0.0;        ///< sampling pitch the calibration was made at
  int m = 0;
  double eps = 0.0;
  MetricKind metric = MetricKind::extrinsic;
};

/// Calibration constant: 1 / (eps^m * beta_eps(unit m-cube sampled at `pitch`)).
/// Results are cached per (m, eps, pitch).
double calibration_constant(int m, double eps, double pitch);

/// c_m * eps^m * beta_eps(subset). Refuses when eps < 2 * resolution.
MeasureEstimate hausdorff_measure_estimate(const Subset& subset, int m, double eps,
                                           MetricKind metric = MetricKind::extrinsic);

struct DimensionEstimate {
  double slope = 0.0;
  double residual = 0.0;            ///< RMS residual of the fit in log space
  std::vector<double> eps;
  std::vector<std::int64_t> beta;
};

/// Least-squares slope of log beta_eps against log(1/eps).
DimensionEstimate packing_dimension_estimate(const Space& space, std::span<const PointId> ids,
                                             std::vector<double> eps_grid);

}  // namespace alexkit
