#pragma once

// Nets, the chart-blending projection onto an extremal subset, the
// cross-space almost isometry and the volume convergence harness.

#include <optional>
#include <string>
#include <vector>

#include "alexkit/measure.hpp"
#include "alexkit/space.hpp"
#include "alexkit/strainers.hpp"

namespace alexkit {

/// Greedy r/2-discrete set in id order; maximal by construction, and the
/// maximality is re-verified before returning. Requires r >= 4h.
std::vector<PointId> discrete_net(const Subset& subset, double r);

/// chi: 1 on [0, 1], 0 on [2, inf), smoothstep in between.
double bump(double t);

struct GlueOptions {
  double rho = 0.0;                 ///< 0 means r / 10
  bool rebase = true;               ///< move strainer points to distance ell * delta along shortest paths
  bool shuffled = false;            ///< blend charts in a seeded shuffled order instead of net order
  std::uint64_t seed = 1;
  double search_radius = 0.0;       ///< strainer search radius; 0 means 2 ell
  std::size_t quality_domain_cap = 4000;  ///< domain points sampled for pair statistics
  StrainerSearch search;
};

struct GlueQuality {
  double lip = 0.0;                  ///< max d(fx, fy) / d(x, y)
  double colip = 0.0;                ///< 1 - worst openness defect of psi_j o f
  double eps_open = 0.0;
  double displacement_ratio_max = 0.0;   ///< max d(x, fx) / d(x, E) off E
  double displacement_excess = 0.0;      ///< max d(x, fx) - 2 d(x, E) - 4h
  double claim1 = 0.0;               ///< max d(psi_j^-1 phi_j x, f x) / r over x in 3 U_j
  double claim2 = 0.0;               ///< max blend-difference quotient
  bool identity_on_subset = false;
  std::int64_t pairs = 0;
};

struct GlueMap {
  std::string subset;
  std::vector<PointId> net;
  std::vector<std::size_t> order;  ///< chart order used by the blend (indices into net)
  double r = 0.0;
  double rho = 0.0;
  double delta = 0.0;
  double ell = 0.0;
  bool r_within_ell_delta2 = false;  ///< r < ell delta^2, as the construction asks
  std::vector<Strainer> local_strainers;
  std::vector<PointId> domain;       ///< the sampled rho-collar U_rho(E), sorted
  std::vector<PointId> assignment;   ///< image in E per domain point
  std::vector<double> dist_to_subset;  ///< d(x, E) per domain point
  std::vector<PointId> flagged;      ///< blend targets outside psi_k's value range
  std::size_t quality_cap = 4000;
  GlueQuality quality;
};

/// Builds f: U_rho(E) -> E by the inductive chart blend. Refuses if some
/// subset point has no (m, delta)-strainer of length > ell, if
/// (3 + 2 sqrt m) rho >= r, or if a net point has no strainer after re-basing.
GlueMap build_projection(const Subset& subset, int m, double delta, double ell, double r, const GlueOptions& opt = {});

/// Fills map.quality.
GlueQuality projection_quality(const Subset& subset, const GlueMap& map);

struct CrossSpaceResult {
  std::vector<PointId> net;            ///< net in E
  std::vector<PointId> assignment;     ///< f(x) in F per E point (local order of E)
  double distortion = 0.0;             ///< max |d_F(fx, fy) / d_E(x, y) - 1| over pairs with d >= 10h
  double displacement = 0.0;           ///< max d_F(f x, g x)
  std::int64_t pairs = 0;
};

/// Transfers the strainer charts of E to F through the correspondence g
/// (g[i] = image of E's i-th point, as an F point id) and blends them like
/// build_projection.
CrossSpaceResult cross_space_almost_isometry(const Subset& e, const Subset& f, const std::vector<PointId>& g, int m,
                                             double delta, double ell, double r, const GlueOptions& opt = {});

struct ConvergenceRow {
  std::string label;
  double extrinsic = 0.0;
  double intrinsic = 0.0;
  std::optional<double> exact;
  double deviation = 0.0;  ///< |extrinsic - limit|, or |extrinsic - exact| when no limit is given
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::optional<double> limit;
  bool eventually_decreasing = false;  ///< after the first row, each deviation is at most the previous plus slack
  double slack = 0.0;                  ///< eps^m: one packing count
  bool collapse = false;               ///< estimates fall toward 0 against a positive limit
};

struct FamilyMember {
  std::string label;
  Subset subset;
  std::optional<double> exact;
};

ConvergenceTable volume_convergence_experiment(const std::vector<FamilyMember>& family, int m, double eps,
                                               std::optional<double> limit);

}  // namespace alexkit
