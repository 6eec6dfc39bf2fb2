#pragma once

// (k, delta)-strainers: the predicate, a beam search for witnesses, and the
// classifications built on them.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "alexkit/space.hpp"

namespace alexkit {

using PointPair = std::pair<PointId, PointId>;

struct Strainer {
  PointId base = -1;
  std::vector<PointPair> pairs;
  double delta_achieved = 0.0;  ///< smallest delta the inequalities allow (the margin)
  double length = kInf;         ///< min distance from the base to a strainer point

  std::size_t k() const { return pairs.size(); }
};

struct StrainerCheck {
  bool ok = false;      ///< margin < delta
  double margin = 0.0;  ///< max(0, max over inequalities of threshold - comparison angle)
};

/// Margin of the pairs at p: pi - angle(a_i p b_i) and pi/2 - angle for every
/// cross pair, clipped below at 0. Throws on coincident points.
double strainer_margin(const Space& space, PointId p, const std::vector<PointPair>& pairs);

StrainerCheck is_strainer(const Space& space, PointId p, const std::vector<PointPair>& pairs, double delta);

struct StrainerSearch {
  int beam_width = 8;
  std::size_t max_candidates = 320;  ///< larger pools are thinned by an even id stride
};

/// Beam search for a (k, delta)-strainer at p with all points in the annulus
/// ell < d(p, .) < search_radius. A miss is not a proof of absence.
/// `diagnostic` (optional) receives the reason for a miss.
std::optional<Strainer> find_strainer(const Space& space, PointId p, int k, double delta, double ell,
                                      double search_radius, const StrainerSearch& opt = {},
                                      std::string* diagnostic = nullptr);

struct ClassificationMask {
  std::string subset;
  int k = 0;
  double delta = 0.0;
  double ell = 0.0;
  double search_radius = 0.0;
  std::vector<PointId> member_ids;
  std::vector<Strainer> witnesses;  ///< parallel to member_ids
  std::vector<double> margins;      ///< per subset point (local order): best margin found, inf if none
};

ClassificationMask classify(const Subset& subset, int k, double delta, double ell, double search_radius,
                            const StrainerSearch& opt = {});

struct StrainerNumber {
  int k = 0;
  std::vector<Strainer> witnesses;  ///< one per k = 1..value
};

/// Largest k for which some subset point has a (k, delta)-strainer of length
/// > ell, searching k = 1, 2, ... up to max_k.
StrainerNumber strainer_number(const Subset& subset, double delta, double ell, double search_radius,
                               int max_k = 3, const StrainerSearch& opt = {});

struct LocalStrainerNumber {
  int value = 0;
  bool stable = true;             ///< the two smallest scales agree
  std::vector<double> scales;
  std::vector<int> profile;
};

/// strainer_number over subset ∩ B(p, r) for each scale r, with strainers of
/// length > r/4 found within r/2 of each point.
LocalStrainerNumber local_strainer_number(const Subset& subset, PointId p, double delta, std::vector<double> scales,
                                          int max_k = 3, const StrainerSearch& opt = {});

struct RegularPoints {
  std::vector<double> deltas;
  std::vector<ClassificationMask> masks;  ///< nested: each is contained in the previous
  std::vector<PointId> regular_ids;       ///< the mask at the smallest delta
  double fraction = 0.0;                  ///< |regular_ids| / |subset|
};

RegularPoints regular_points(const Subset& subset, int m, std::vector<double> delta_schedule, double ell,
                             double search_radius, const StrainerSearch& opt = {});

struct UnstrainedMass {
  double value = 0.0;             ///< eps^m * beta_eps(E minus E(k, delta, ell))
  std::int64_t beta = 0;
  std::vector<PointId> unstrained_ids;
};

UnstrainedMass unstrained_mass(const Subset& subset, int m, int k, double delta, double ell, double eps,
                               double search_radius, const StrainerSearch& opt = {});

}  // namespace alexkit
