#include "alexkit/glue.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "alexkit/charts.hpp"
#include "alexkit/error.hpp"
#include "alexkit/parallel.hpp"

namespace alexkit {
namespace {

// A strainer chart in the blend: phi uses source-space anchors, psi the
// target-space anchors, and psi^-1 is a nearest-value lookup over `ids`.
struct BlendChart {
  PointId base = -1;                 // source space
  std::vector<PointId> src_anchors;
  std::vector<PointId> dst_anchors;
  std::vector<PointId> ids;          // target points of the lookup window
  std::vector<double> values;        // |ids| x m
};

struct Lookup {
  PointId id = -1;
  double residual = kInf;
};

std::vector<double> distances_from(const Space& s, const std::vector<PointId>& anchors, PointId x) {
  std::vector<double> v(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) v[i] = s.dist(anchors[i], x);
  return v;
}

Lookup inverse(const BlendChart& c, const std::vector<double>& v) {
  const std::size_t m = v.size();
  Lookup best;
  for (std::size_t t = 0; t < c.ids.size(); ++t) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = c.values[t * m + i] - v[i];
      s += d * d;
    }
    // ids are sorted, so strict < keeps the lowest id on ties
    if (s < best.residual) {
      best.residual = s;
      best.id = c.ids[t];
    }
  }
  best.residual = std::sqrt(best.residual);
  return best;
}

BlendChart make_chart(const Space& dst, PointId base, PointId dst_base,
                      std::vector<PointId> src_anchors, std::vector<PointId> dst_anchors, const Subset& target,
                      double window) {
  BlendChart c;
  c.base = base;
  c.src_anchors = std::move(src_anchors);
  c.dst_anchors = std::move(dst_anchors);
  c.ids = target.ball(dst_base, window);
  for (const PointId y : c.ids)
    for (const PointId a : c.dst_anchors) c.values.push_back(dst.dist(a, y));
  return c;
}

struct BlendResult {
  PointId image = -1;
  double residual = 0.0;
};

// The inductive blend at one point x, following the chart order.
BlendResult blend_point(const Space& src, const Space& dst, const std::vector<BlendChart>& charts,
                        const std::vector<std::size_t>& order, double r, PointId x) {
  BlendResult out;
  bool covered = false;
  for (const std::size_t k : order) {
    const BlendChart& c = charts[k];
    const double d = src.dist(c.base, x);
    if (d >= 2.0 * r) continue;
    if (d < r) {
      const Lookup l = inverse(c, distances_from(src, c.src_anchors, x));
      out.image = l.id;
      out.residual = std::max(out.residual, l.residual);
      covered = true;
    } else if (covered) {
      const double chi = bump(d / r);
      const auto phi = distances_from(src, c.src_anchors, x);
      const auto psi = distances_from(dst, c.dst_anchors, out.image);
      std::vector<double> v(phi.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1.0 - chi) * psi[i] + chi * phi[i];
      const Lookup l = inverse(c, v);
      out.image = l.id;
      out.residual = std::max(out.residual, l.residual);
    }
  }
  return out;
}

std::vector<std::size_t> chart_order(std::size_t n, const GlueOptions& opt) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (opt.shuffled) {
    std::mt19937_64 rng(opt.seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  }
  return order;
}

// Point of `pool` at distance ~ t from p that lies closest to a shortest
// path from p to a, measured by the excess d(p, x) + d(x, a) - d(p, a).
PointId rebase_point(const Space& s, const Subset& pool, PointId p, PointId a, double t, double h) {
  const double band = std::max(h, 1e-12);
  PointId best = -1;
  double best_excess = kInf;
  for (const PointId x : pool.ball(p, t + band)) {
    const double dpx = s.dist(p, x);
    if (dpx < t - band || x == p) continue;
    const double excess = dpx + s.dist(x, a) - s.dist(p, a);
    if (excess < best_excess) {
      best_excess = excess;
      best = x;
    }
  }
  return best;
}

std::string id_list(const std::vector<PointId>& ids, std::size_t cap = 10) {
  std::string s;
  for (std::size_t i = 0; i < std::min(cap, ids.size()); ++i) s += (i ? ", " : "") + std::to_string(ids[i]);
  if (ids.size() > cap) s += ", ...";
  return s;
}

std::vector<std::size_t> stride_sample(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> out;
  if (n == 0) return out;
  const std::size_t stride = cap == 0 ? 1 : std::max<std::size_t>(1, (n + cap - 1) / cap);
  for (std::size_t i = 0; i < n; i += stride) out.push_back(i);
  return out;
}

// Strainers on the net, optionally moved to distance ell*delta, verified at delta.
std::vector<Strainer> net_strainers(const Space& space, const Subset& pool, const ClassificationMask& mask,
                                    const std::vector<PointId>& net, double delta, double ell,
                                    bool rebase) {
  const double h = space.resolution_or(0.0);
  std::vector<Strainer> out;
  for (const PointId p : net) {
    const auto it = std::lower_bound(mask.member_ids.begin(), mask.member_ids.end(), p);
    if (it == mask.member_ids.end() || *it != p)
      throw RefusalError("net point " + std::to_string(p) + " has no strainer");
    Strainer s = mask.witnesses[static_cast<std::size_t>(it - mask.member_ids.begin())];
    if (rebase) {
      for (auto& [a, b] : s.pairs) {
        const PointId a2 = rebase_point(space, pool, p, a, ell * delta, h);
        const PointId b2 = rebase_point(space, pool, p, b, ell * delta, h);
        if (a2 < 0 || b2 < 0 || a2 == b2)
          throw RefusalError("no sample point at distance ell*delta toward the strainer of net point " +
                             std::to_string(p));
        a = a2;
        b = b2;
      }
      const StrainerCheck chk = is_strainer(space, p, s.pairs, delta);
      if (!chk.ok)
        throw RefusalError("re-based strainer at net point " + std::to_string(p) + " has margin " +
                           std::to_string(chk.margin) + " >= delta");
      s.delta_achieved = chk.margin;
      s.length = kInf;
      for (const auto& [a, b] : s.pairs) s.length = std::min({s.length, space.dist(p, a), space.dist(p, b)});
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PointId> anchors_of(const Strainer& s) {
  std::vector<PointId> a;
  for (const auto& pr : s.pairs) a.push_back(pr.first);
  return a;
}

}  // namespace

double bump(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double s = t - 1.0;
  return 1.0 - 3.0 * s * s + 2.0 * s * s * s;
}

std::vector<PointId> discrete_net(const Subset& subset, double r) {
  const Space& space = subset.space();
  const double h = space.resolution_or(0.0);
  if (r < 4.0 * h * (1.0 - 1e-12)) throw RefusalError("net scale r must be at least 4h");
  const double sep = r / 2.0;
  std::vector<PointId> net;
  std::vector<std::uint8_t> blocked(subset.size(), 0);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (blocked[i]) continue;
    const PointId p = subset.id(i);
    net.push_back(p);
    for (const PointId q : subset.ball(p, sep * (1.0 + 1e-12)))
      if (space.dist(p, q) <= sep) blocked[static_cast<std::size_t>(subset.local_index(q))] = 1;
  }
  // every point within r/2 of the net, and net points pairwise farther than r/2
  for (std::size_t a = 0; a < net.size(); ++a)
    for (std::size_t b = a + 1; b < net.size(); ++b)
      if (space.dist(net[a], net[b]) <= sep) throw Error("net is not r/2-discrete");
  for (std::size_t i = 0; i < subset.size(); ++i)
    if (!blocked[i]) throw Error("net is not maximal");
  return net;
}

GlueMap build_projection(const Subset& subset, int m, double delta, double ell, double r, const GlueOptions& opt) {
  const Space& space = subset.space();
  const double h = space.resolution_or(0.0);
  if (m < 1) throw RefusalError("m must be at least 1");
  if (subset.size() == 0) throw RefusalError("subset is empty");
  GlueMap map;
  map.subset = subset.name();
  map.r = r;
  map.rho = opt.rho > 0.0 ? opt.rho : r / 10.0;
  map.delta = delta;
  map.ell = ell;
  map.quality_cap = opt.quality_domain_cap;
  map.r_within_ell_delta2 = r < ell * delta * delta;
  if (!((3.0 + 2.0 * std::sqrt(static_cast<double>(m))) * map.rho < r))
    throw RefusalError("collar too wide: (3 + 2 sqrt(m)) rho must be below r");
  const double sr = opt.search_radius > 0.0 ? opt.search_radius : 2.0 * ell;

  const ClassificationMask mask = classify(subset, m, delta, ell, sr, opt.search);
  if (mask.member_ids.size() != subset.size()) {
    std::vector<PointId> bad;
    std::size_t t = 0;
    for (std::size_t i = 0; i < subset.size(); ++i) {
      if (t < mask.member_ids.size() && mask.member_ids[t] == subset.id(i)) {
        ++t;
        continue;
      }
      bad.push_back(subset.id(i));
    }
    throw RefusalError(std::to_string(bad.size()) + " subset points are not (" + std::to_string(m) + ", " +
                       std::to_string(delta) + ")-strained with length > ell: " + id_list(bad));
  }

  map.net = discrete_net(subset, r);
  const Subset pool = Subset::whole(subset.space_ptr());
  map.local_strainers = net_strainers(space, pool, mask, map.net, delta, ell, opt.rebase);
  map.order = chart_order(map.net.size(), opt);

  std::vector<BlendChart> charts;
  for (std::size_t j = 0; j < map.net.size(); ++j) {
    const auto a = anchors_of(map.local_strainers[j]);
    charts.push_back(make_chart(space, map.net[j], map.net[j], a, a, subset, 3.0 * r));
  }

  // the sampled collar: every point within rho of some subset point
  std::vector<double> de(space.size(), kInf);
  for (const PointId e : subset.indices())
    space.for_each_within(e, map.rho, [&](PointId x, double d) {
      if (d < map.rho) de[static_cast<std::size_t>(x)] = std::min(de[static_cast<std::size_t>(x)], d);
    });
  for (std::size_t x = 0; x < space.size(); ++x)
    if (de[x] < map.rho) {
      map.domain.push_back(static_cast<PointId>(x));
      map.dist_to_subset.push_back(de[x]);
    }

  const std::size_t n = map.domain.size();
  std::vector<BlendResult> res(n);
  parallel::for_each_index(n, [&](std::size_t i) {
    res[i] = blend_point(space, space, charts, map.order, r, map.domain[i]);
  });
  const double slack = 2.0 * h + delta * r;
  map.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (res[i].image < 0) throw Error("collar point " + std::to_string(map.domain[i]) + " is not covered by any chart");
    map.assignment[i] = res[i].image;
    if (res[i].residual > slack) map.flagged.push_back(map.domain[i]);
  }
  map.quality = projection_quality(subset, map);
  return map;
}

GlueQuality projection_quality(const Subset& subset, const GlueMap& map) {
  const Space& space = subset.space();
  const double h = space.resolution_or(0.0);
  const double r = map.r;
  const double near = 10.0 * h;
  GlueQuality q;
  q.displacement_excess = -kInf;

  std::vector<std::int64_t> slot(space.size(), -1);
  for (std::size_t i = 0; i < map.domain.size(); ++i) slot[static_cast<std::size_t>(map.domain[i])] = static_cast<std::int64_t>(i);

  q.identity_on_subset = true;
  for (std::size_t i = 0; i < map.domain.size(); ++i) {
    const PointId x = map.domain[i];
    const double dfx = space.dist(x, map.assignment[i]);
    if (subset.contains(x)) {
      if (map.assignment[i] != x) q.identity_on_subset = false;
      continue;
    }
    q.displacement_ratio_max = std::max(q.displacement_ratio_max, dfx / map.dist_to_subset[i]);
    q.displacement_excess = std::max(q.displacement_excess, dfx - 2.0 * map.dist_to_subset[i] - 4.0 * h);
  }
  if (!std::isfinite(q.displacement_excess)) q.displacement_excess = 0.0;

  std::vector<BlendChart> charts;
  for (std::size_t j = 0; j < map.net.size(); ++j) {
    const auto a = anchors_of(map.local_strainers[j]);
    charts.push_back(make_chart(space, map.net[j], map.net[j], a, a, subset, 3.0 * r));
  }
  const std::size_t m = map.local_strainers.empty() ? 0 : map.local_strainers.front().k();
  const auto dirs = direction_grid(m, 8);

  struct Local {
    double lip = 0.0, open = 0.0, c1 = 0.0, c2 = 0.0;
    std::int64_t pairs = 0;
  };
  const auto chosen = stride_sample(map.domain.size(), map.quality_cap);
  std::vector<Local> loc(chosen.size());
  parallel::for_each_index(chosen.size(), [&](std::size_t t) {
    const std::size_t i = chosen[t];
    const PointId x = map.domain[i];
    const PointId fx = map.assignment[i];
    Local& L = loc[t];
    std::vector<std::pair<PointId, PointId>> nbrs;  // (y, f y)
    space.for_each_within(x, r, [&](PointId y, double d) {
      if (d < near || slot[static_cast<std::size_t>(y)] < 0) return;
      nbrs.emplace_back(y, map.assignment[static_cast<std::size_t>(slot[static_cast<std::size_t>(y)])]);
    });
    std::sort(nbrs.begin(), nbrs.end());
    for (const auto& [y, fy] : nbrs) {
      L.lip = std::max(L.lip, space.dist(fx, fy) / space.dist(x, y));
      ++L.pairs;
    }
    std::size_t home = 0;
    double home_d = kInf;
    for (std::size_t j = 0; j < charts.size(); ++j) {
      const double d = space.dist(charts[j].base, x);
      if (d < home_d) {
        home_d = d;
        home = j;
      }
      if (d >= 3.0 * r) continue;
      const auto phx = distances_from(space, charts[j].src_anchors, x);
      const PointId local = inverse(charts[j], phx).id;
      L.c1 = std::max(L.c1, space.dist(local, fx) / r);
      const auto psfx = distances_from(space, charts[j].dst_anchors, fx);
      for (const auto& [y, fy] : nbrs) {
        if (space.dist(charts[j].base, y) >= 3.0 * r) continue;
        const auto phy = distances_from(space, charts[j].src_anchors, y);
        const auto psfy = distances_from(space, charts[j].dst_anchors, fy);
        double s = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
          const double v = (phx[c] - phy[c]) - (psfx[c] - psfy[c]);
          s += v * v;
        }
        L.c2 = std::max(L.c2, std::sqrt(s) / space.dist(x, y));
      }
    }
    // openness of psi_home o f at x
    if (charts.empty() || nbrs.empty()) return;
    const auto g0 = distances_from(space, charts[home].dst_anchors, fx);
    std::vector<std::vector<double>> quot;
    for (const auto& [y, fy] : nbrs) {
      const auto g1 = distances_from(space, charts[home].dst_anchors, fy);
      const double d = space.dist(x, y);
      std::vector<double> v(m);
      for (std::size_t c = 0; c < m; ++c) v[c] = (g1[c] - g0[c]) / d;
      quot.push_back(std::move(v));
    }
    for (const auto& xi : dirs) {
      double best = kInf;
      for (const auto& v : quot) {
        double s = 0.0;
        for (std::size_t c = 0; c < m; ++c) s += (v[c] - xi[c]) * (v[c] - xi[c]);
        best = std::min(best, std::sqrt(s));
      }
      L.open = std::max(L.open, best);
    }
  });
  for (const auto& L : loc) {
    q.lip = std::max(q.lip, L.lip);
    q.eps_open = std::max(q.eps_open, L.open);
    q.claim1 = std::max(q.claim1, L.c1);
    q.claim2 = std::max(q.claim2, L.c2);
    q.pairs += L.pairs;
  }
  q.colip = 1.0 - q.eps_open;
  return q;
}

CrossSpaceResult cross_space_almost_isometry(const Subset& e, const Subset& f, const std::vector<PointId>& g, int m,
                                             double delta, double ell, double r, const GlueOptions& opt) {
  const Space& A = e.space();
  const Space& B = f.space();
  if (g.size() != e.size()) throw RefusalError("correspondence must give one image per subset point");
  for (const PointId y : g)
    if (!f.contains(y)) throw RefusalError("correspondence image " + std::to_string(y) + " is not in the target subset");
  const double h = std::max(A.resolution_or(0.0), B.resolution_or(0.0));
  const double sr = opt.search_radius > 0.0 ? opt.search_radius : 2.0 * ell;
  auto image = [&](PointId x) { return g[static_cast<std::size_t>(e.local_index(x))]; };

  const ClassificationMask mask = classify(e, m, delta, ell, sr, opt.search);
  if (mask.member_ids.empty()) throw RefusalError("no subset point is strained at the requested delta and ell");
  const Subset strained(e.space_ptr(), mask.member_ids, e.link_radius(), e.extremal_claim(), e.name());

  CrossSpaceResult out;
  out.net = discrete_net(strained, r);
  const auto strainers = net_strainers(A, e, mask, out.net, delta, ell, opt.rebase);
  std::vector<BlendChart> charts;
  for (std::size_t j = 0; j < out.net.size(); ++j) {
    const Strainer& s = strainers[j];
    std::vector<PointPair> lifted;
    for (const auto& [a, b] : s.pairs) {
      if (!e.contains(a) || !e.contains(b))
        throw RefusalError("strainer of chart " + std::to_string(j) + " leaves the correspondence domain");
      lifted.emplace_back(image(a), image(b));
    }
    const PointId base = image(out.net[j]);
    bool ok = true;
    for (const auto& [a, b] : lifted) ok = ok && a != base && b != base && a != b;
    if (!ok || !is_strainer(B, base, lifted, delta).ok)
      throw RefusalError("strainer of chart " + std::to_string(j) + " does not lift to a strainer in the target");
    std::vector<PointId> dst;
    for (const auto& pr : lifted) dst.push_back(pr.first);
    charts.push_back(make_chart(B, out.net[j], base, anchors_of(s), dst, f, 3.0 * r));
  }
  const auto order = chart_order(out.net.size(), opt);

  const auto& dom = strained.indices();
  std::vector<PointId> fx(dom.size());
  parallel::for_each_index(dom.size(), [&](std::size_t i) { fx[i] = blend_point(A, B, charts, order, r, dom[i]).image; });
  out.assignment.assign(e.size(), -1);
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (fx[i] < 0) throw Error("point " + std::to_string(dom[i]) + " is not covered by any chart");
    out.assignment[static_cast<std::size_t>(e.local_index(dom[i]))] = fx[i];
    out.displacement = std::max(out.displacement, B.dist(fx[i], image(dom[i])));
  }

  const auto chosen = stride_sample(dom.size(), opt.quality_domain_cap);
  std::vector<double> worst(chosen.size(), 0.0);
  std::vector<std::int64_t> count(chosen.size(), 0);
  parallel::for_each_index(chosen.size(), [&](std::size_t t) {
    const std::size_t i = chosen[t];
    for (std::size_t j = 0; j < dom.size(); ++j) {
      const double d = A.dist(dom[i], dom[j]);
      if (j == i || d < 10.0 * h) continue;
      worst[t] = std::max(worst[t], std::abs(B.dist(fx[i], fx[j]) / d - 1.0));
      ++count[t];
    }
  });
  for (std::size_t t = 0; t < chosen.size(); ++t) {
    out.distortion = std::max(out.distortion, worst[t]);
    out.pairs += count[t];
  }
  return out;
}

ConvergenceTable volume_convergence_experiment(const std::vector<FamilyMember>& family, int m, double eps,
                                               std::optional<double> limit) {
  if (family.empty()) throw RefusalError("family is empty");
  ConvergenceTable t;
  t.limit = limit;
  double c = 0.0;
  for (const auto& member : family) {
    ConvergenceRow row;
    row.label = member.label;
    const MeasureEstimate ext = hausdorff_measure_estimate(member.subset, m, eps, MetricKind::extrinsic);
    row.extrinsic = ext.value;
    row.intrinsic = hausdorff_measure_estimate(member.subset, m, eps, MetricKind::intrinsic).value;
    row.exact = member.exact;
    if (limit) row.deviation = std::abs(row.extrinsic - *limit);
    else if (member.exact) row.deviation = std::abs(row.extrinsic - *member.exact);
    c = std::max(c, ext.c_m);
    t.rows.push_back(std::move(row));
  }
  t.slack = c * std::pow(eps, m);
  t.eventually_decreasing = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    if (t.rows[i].deviation > t.rows[i - 1].deviation + t.slack) t.eventually_decreasing = false;
  double peak = 0.0;
  for (const auto& row : t.rows) peak = std::max(peak, row.extrinsic);
  t.collapse = t.rows.size() >= 2 && t.rows.back().extrinsic < 0.25 * peak;
  return t;
}

}  // namespace alexkit
