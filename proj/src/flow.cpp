#include "alexkit/flow.hpp"

#include <algorithm>
#include <cmath>

#include "alexkit/error.hpp"
#include "alexkit/kplane.hpp"
#include "alexkit/parallel.hpp"

namespace alexkit {

void validate_flow_config(const Space& space, const FlowConfig& cfg) {
  const double h = space.resolution_or(0.0);
  if (!(cfg.step > 0.0) || cfg.step < 2.0 * h * (1.0 - 1e-12)) throw RefusalError("flow step must be at least 2h");
  if (!(cfg.witness_radius >= cfg.step)) throw RefusalError("witness radius must be at least the step");
  if (cfg.max_steps < 0) throw RefusalError("max_steps must be nonnegative");
}

double directional_derivative(const Space& space, PointId q, PointId x, PointId w) {
  space.check_id(q);
  space.check_id(x);
  space.check_id(w);
  if (q == x || w == x) throw UndefinedAngleError("directional derivative needs x distinct from q and w");
  const double a = kplane::comparison_angle(space.kappa(), space.dist(x, q), space.dist(x, w), space.dist(q, w),
                                            kplane::Degenerate::zero);
  return -std::cos(a);
}

GradientCurve gradient_curve(const Space& space, PointId q, PointId x0, const FlowConfig& cfg) {
  validate_flow_config(space, cfg);
  space.check_id(q);
  space.check_id(x0);
  if (q == x0) throw RefusalError("gradient curve cannot start at the source point");
  GradientCurve g;
  g.curve.step = cfg.step;
  g.curve.kind = CurveKind::gradient;
  g.curve.points.push_back(x0);
  const double reach = std::min(cfg.witness_radius, 1.5 * cfg.step);
  PointId x = x0;
  for (int s = 0; s < cfg.max_steps; ++s) {
    double best = -kInf;
    PointId arg = -1;
    bool any = false;
    const double dxq = space.dist(x, q);
    space.for_each_within(x, reach, [&](PointId w, double dxw) {
      if (dxw < cfg.step || w == q) return;
      any = true;
      const double a = kplane::comparison_angle(space.kappa(), dxq, dxw, space.dist(q, w), kplane::Degenerate::zero);
      const double d = -std::cos(a);
      if (d > best || (d == best && w < arg)) {
        best = d;
        arg = w;
      }
    });
    if (!any)
      throw StalledError("gradient curve stalled at point " + std::to_string(x) + ": no point at distance in [" +
                         std::to_string(cfg.step) + ", " + std::to_string(reach) + "]");
    g.derivatives.push_back(best);
    if (best <= cfg.stop_threshold) {
      g.stopped_critical = true;
      break;
    }
    x = arg;
    g.curve.points.push_back(x);
  }
  return g;
}

InvarianceResult extremal_invariance_test(const Subset& subset, PointId q, const std::vector<PointId>& starts,
                                          const FlowConfig& cfg) {
  const Space& space = subset.space();
  validate_flow_config(space, cfg);
  for (const PointId s : starts)
    if (!subset.contains(s)) throw RefusalError("start " + std::to_string(s) + " is not in the subset");
  InvarianceResult r;
  const std::size_t n = starts.size();
  r.deviations.assign(n, 0.0);
  r.curves.resize(n);
  r.stalls.assign(n, "");
  parallel::for_each_index(n, [&](std::size_t i) {
    try {
      r.curves[i] = gradient_curve(space, q, starts[i], cfg);
    } catch (const StalledError& e) {
      r.stalls[i] = e.what();
      return;
    }
    double dev = 0.0;
    for (const PointId x : r.curves[i].curve.points) dev = std::max(dev, subset.distance_to(x).first);
    r.deviations[i] = dev;
  });
  for (const double d : r.deviations) r.max_deviation = std::max(r.max_deviation, d);
  return r;
}

GradientBound dist_gradient_lower_bound(const Subset& subset, double inner, double outer, const FlowConfig& cfg) {
  const Space& space = subset.space();
  validate_flow_config(space, cfg);
  const double h = space.resolution_or(0.0);
  if (inner < 2.0 * h * (1.0 - 1e-12)) throw RefusalError("band inner radius must be at least 2h");
  if (!(outer >= inner)) throw RefusalError("band outer radius must be at least the inner radius");

  std::vector<PointId> band;
  std::vector<double> dist_e;
  for (std::size_t x = 0; x < space.size(); ++x) {
    const auto id = static_cast<PointId>(x);
    if (subset.contains(id)) continue;
    const double d = subset.distance_to(id).first;
    if (d >= inner && d <= outer) {
      band.push_back(id);
      dist_e.push_back(d);
    }
  }
  if (band.empty()) throw RefusalError("no sample point lies in the band");

  std::vector<double> best(band.size(), -kInf);
  parallel::for_each_index(band.size(), [&](std::size_t i) {
    const PointId x = band[i];
    const auto nearest = subset.ball(x, dist_e[i] * (1.0 + 1e-9) + 1e-15);
    space.for_each_within(x, cfg.witness_radius, [&](PointId w, double dxw) {
      if (dxw < cfg.step) return;
      double deriv = kInf;
      for (const PointId e : nearest) {
        if (e == w) {
          deriv = std::min(deriv, -1.0);
          continue;
        }
        const double a =
            kplane::comparison_angle(space.kappa(), space.dist(x, e), dxw, space.dist(e, w), kplane::Degenerate::zero);
        deriv = std::min(deriv, -std::cos(a));
      }
      best[i] = std::max(best[i], deriv);
    });
  });
  GradientBound g;
  g.band_points = static_cast<std::int64_t>(band.size());
  g.epsilon = kInf;
  for (std::size_t i = 0; i < band.size(); ++i)
    if (best[i] < g.epsilon) {
      g.epsilon = best[i];
      g.argmin = band[i];
    }
  g.critical = g.epsilon <= cfg.stop_threshold;
  return g;
}

}  // namespace alexkit
