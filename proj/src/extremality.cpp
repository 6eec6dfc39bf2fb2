#include "alexkit/extremality.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "alexkit/error.hpp"
#include "alexkit/kernels.hpp"
#include "alexkit/kplane.hpp"
#include "alexkit/parallel.hpp"

namespace alexkit {

ExtremalityReport extremality_check(const Subset& subset, const ExtremalityOptions& opt) {
  const Space& space = subset.space();
  if (subset.size() == 0) throw RefusalError("extremality check needs a nonempty subset");
  const double h = space.resolution_or(0.0);
  if (!(opt.witness_radius > 0.0) || opt.witness_radius < 2.0 * h * (1.0 - 1e-12))
    throw RefusalError("witness radius must be at least twice the sampling resolution");

  ExtremalityReport rep;
  rep.witness_radius = opt.witness_radius;
  rep.angle_tol = opt.angle_tol.value_or(0.05 + 2.0 * h / opt.witness_radius);

  std::vector<PointId> all(space.size());
  std::iota(all.begin(), all.end(), 0);
  const auto near = kernels::omp::nearest(space, all, subset.indices());
  std::vector<PointId> exterior;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (near.distance[i] >= opt.witness_radius) exterior.push_back(all[i]);
  if (exterior.empty()) return rep;

  std::vector<PointId> qs;
  const std::size_t want = static_cast<std::size_t>(std::max(1, opt.max_exterior));
  if (exterior.size() <= want) {
    qs = exterior;
  } else {
    for (std::size_t i = 0; i < want; ++i) qs.push_back(exterior[i * exterior.size() / want]);
  }
  rep.exterior_points = static_cast<int>(qs.size());

  const LinkGraph& g = subset.link_graph();
  const double half_pi = std::numbers::pi / 2.0;

  struct Local {
    double excess = -kInf;
    PointId p = -1, w = -1;
    int minima = 0;
    std::int64_t witnesses = 0;
  };
  std::vector<Local> per_q(qs.size());
  parallel::for_each_index(qs.size(), [&](std::size_t t) {
    const PointId q = qs[t];
    Local& loc = per_q[t];
    std::vector<double> dq(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) dq[i] = space.dist(q, subset.id(i));
    for (std::size_t i = 0; i < subset.size(); ++i) {
      bool is_min = true;
      for (std::uint32_t e = g.offsets[i]; e < g.offsets[i + 1] && is_min; ++e)
        if (dq[g.targets[e]] < dq[i]) is_min = false;
      if (!is_min) continue;
      ++loc.minima;
      const PointId p = subset.id(i);
      for (const PointId w : space.ball(p, opt.witness_radius * (1.0 + 1e-12))) {
        if (w == p || w == q) continue;
        const double a = kplane::comparison_angle(space.kappa(), dq[i], space.dist(p, w), space.dist(q, w),
                                                  kplane::Degenerate::zero);
        ++loc.witnesses;
        const double excess = a - half_pi;
        if (excess > loc.excess) {
          loc.excess = excess;
          loc.p = p;
          loc.w = w;
        }
      }
    }
  });
  for (std::size_t t = 0; t < qs.size(); ++t) {
    const Local& loc = per_q[t];
    rep.local_minima += loc.minima;
    rep.witnesses_checked += loc.witnesses;
    if (loc.excess > rep.worst_excess) {
      rep.worst_excess = loc.excess;
      rep.worst_q = qs[t];
      rep.worst_p = loc.p;
      rep.worst_w = loc.w;
    }
  }
  rep.passed = !(rep.worst_excess > rep.angle_tol);
  return rep;
}

}  // namespace alexkit
