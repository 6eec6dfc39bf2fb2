#include "alexkit/strainers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>

#include "alexkit/error.hpp"
#include "alexkit/kplane.hpp"
#include "alexkit/measure.hpp"
#include "alexkit/parallel.hpp"

namespace alexkit {
namespace {

constexpr double kPi = std::numbers::pi;

double angle_at(const Space& s, PointId p, PointId x, PointId y) {
  return kplane::comparison_angle(s.kappa(), s.dist(p, x), s.dist(p, y), s.dist(x, y), kplane::Degenerate::zero);
}

void check_distinct(PointId p, const std::vector<PointPair>& pairs) {
  std::vector<PointId> all{p};
  for (const auto& [a, b] : pairs) {
    all.push_back(a);
    all.push_back(b);
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw UndefinedAngleError("strainer points must be distinct from each other and from the base");
}

// Margin contributed by adding pair (a, b) to points already in `pts`.
double cross_margin(const Space& s, PointId p, PointId a, PointId b, const std::vector<PointId>& pts) {
  double m = 0.0;
  for (const PointId x : pts) {
    m = std::max(m, kPi / 2.0 - angle_at(s, p, a, x));
    m = std::max(m, kPi / 2.0 - angle_at(s, p, b, x));
  }
  return m;
}

// Visiting order that spreads over the index range, so existence searches
// meet representative points early.
std::vector<std::size_t> spread_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  if (n == 0) return order;
  auto step = static_cast<std::size_t>(std::llround(static_cast<double>(n) * 0.6180339887498949));
  step = std::max<std::size_t>(step, 1);
  while (std::gcd(step, n) != 1) ++step;
  for (std::size_t i = 0; i < n; ++i) order[i] = (i * step) % n;
  return order;
}

}  // namespace

double strainer_margin(const Space& space, PointId p, const std::vector<PointPair>& pairs) {
  space.check_id(p);
  for (const auto& [a, b] : pairs) {
    space.check_id(a);
    space.check_id(b);
  }
  check_distinct(p, pairs);
  double m = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [a, b] = pairs[i];
    m = std::max(m, kPi - angle_at(space, p, a, b));
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      const auto [c, d] = pairs[j];
      for (const PointId x : {a, b})
        for (const PointId y : {c, d}) m = std::max(m, kPi / 2.0 - angle_at(space, p, x, y));
    }
  }
  return m;
}

StrainerCheck is_strainer(const Space& space, PointId p, const std::vector<PointPair>& pairs, double delta) {
  StrainerCheck c;
  c.margin = strainer_margin(space, p, pairs);
  c.ok = pairs.empty() || c.margin < delta;
  return c;
}

std::optional<Strainer> find_strainer(const Space& space, PointId p, int k, double delta, double ell,
                                      double search_radius, const StrainerSearch& opt, std::string* diagnostic) {
  space.check_id(p);
  if (k < 0) throw RefusalError("strainer size k must be nonnegative");
  if (!(ell >= 0.0) || !(search_radius > ell)) throw RefusalError("need 0 <= ell < search_radius");
  if (k == 0) return Strainer{p, {}, 0.0, kInf};

  std::vector<PointId> pool = space.annulus(p, ell, search_radius);
  if (pool.size() > opt.max_candidates) {
    std::vector<PointId> thin;
    for (std::size_t i = 0; i < opt.max_candidates; ++i) thin.push_back(pool[i * pool.size() / opt.max_candidates]);
    pool = std::move(thin);
  }
  if (pool.size() < static_cast<std::size_t>(2 * k)) {
    if (diagnostic) *diagnostic = pool.empty() ? "empty candidate pool" : "candidate pool smaller than 2k";
    return std::nullopt;
  }

  // Best partner of every candidate: spreads the first-pair choices over all directions.
  const std::size_t P = pool.size();
  std::vector<double> dp(P);
  for (std::size_t i = 0; i < P; ++i) dp[i] = space.dist(p, pool[i]);
  std::vector<double> best(P, kInf);
  std::vector<std::size_t> partner(P, P);
  for (std::size_t i = 0; i < P; ++i)
    for (std::size_t j = i + 1; j < P; ++j) {
      const double a = kplane::comparison_angle(space.kappa(), dp[i], dp[j], space.dist(pool[i], pool[j]),
                                                kplane::Degenerate::zero);
      const double m = std::max(0.0, kPi - a);
      if (m < best[i]) {
        best[i] = m;
        partner[i] = j;
      }
      if (m < best[j]) {
        best[j] = m;
        partner[j] = i;
      }
    }
  struct Cand {
    double margin;
    PointId a, b;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < P; ++i) {
    if (partner[i] == P || !(best[i] < delta)) continue;
    const PointId a = std::min(pool[i], pool[partner[i]]);
    const PointId b = std::max(pool[i], pool[partner[i]]);
    cands.push_back({best[i], a, b});
  }
  auto cand_less = [](const Cand& x, const Cand& y) { return std::tie(x.margin, x.a, x.b) < std::tie(y.margin, y.a, y.b); };
  std::sort(cands.begin(), cands.end(), cand_less);
  cands.erase(std::unique(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.a == y.a && x.b == y.b; }),
              cands.end());
  if (cands.empty()) {
    if (diagnostic) *diagnostic = "no pair reaches angle > pi - delta";
    return std::nullopt;
  }

  struct State {
    double margin;
    std::vector<PointPair> pairs;  // kept sorted
    std::vector<PointId> pts;
  };
  auto state_less = [](const State& x, const State& y) { return std::tie(x.margin, x.pairs) < std::tie(y.margin, y.pairs); };
  std::vector<State> beam;
  for (std::size_t i = 0; i < cands.size() && beam.size() < static_cast<std::size_t>(opt.beam_width); ++i)
    beam.push_back({cands[i].margin, {{cands[i].a, cands[i].b}}, {cands[i].a, cands[i].b}});

  for (int level = 1; level < k; ++level) {
    std::vector<State> next;
    for (const State& s : beam)
      for (const Cand& c : cands) {
        if (std::find(s.pts.begin(), s.pts.end(), c.a) != s.pts.end() ||
            std::find(s.pts.begin(), s.pts.end(), c.b) != s.pts.end())
          continue;
        double m = std::max(s.margin, c.margin);
        if (!(m < delta)) continue;
        m = std::max(m, cross_margin(space, p, c.a, c.b, s.pts));
        if (!(m < delta)) continue;
        State t{m, s.pairs, s.pts};
        t.pairs.emplace_back(c.a, c.b);
        std::sort(t.pairs.begin(), t.pairs.end());
        t.pts.push_back(c.a);
        t.pts.push_back(c.b);
        next.push_back(std::move(t));
      }
    std::sort(next.begin(), next.end(), state_less);
    next.erase(std::unique(next.begin(), next.end(), [](const State& x, const State& y) { return x.pairs == y.pairs; }),
               next.end());
    if (next.size() > static_cast<std::size_t>(opt.beam_width)) next.resize(static_cast<std::size_t>(opt.beam_width));
    beam = std::move(next);
    if (beam.empty()) {
      if (diagnostic) *diagnostic = "beam emptied at pair " + std::to_string(level + 1);
      return std::nullopt;
    }
  }

  Strainer s;
  s.base = p;
  s.pairs = beam.front().pairs;
  s.delta_achieved = strainer_margin(space, p, s.pairs);
  for (const auto& [a, b] : s.pairs) s.length = std::min({s.length, space.dist(p, a), space.dist(p, b)});
  if (!(s.delta_achieved < delta)) {
    if (diagnostic) *diagnostic = "recomputed margin not below delta";
    return std::nullopt;
  }
  return s;
}

ClassificationMask classify(const Subset& subset, int k, double delta, double ell, double search_radius,
                            const StrainerSearch& opt) {
  ClassificationMask mask;
  mask.subset = subset.name();
  mask.k = k;
  mask.delta = delta;
  mask.ell = ell;
  mask.search_radius = search_radius;
  const std::size_t n = subset.size();
  std::vector<std::optional<Strainer>> found(n);
  parallel::for_each_index(n, [&](std::size_t i) {
    found[i] = find_strainer(subset.space(), subset.id(i), k, delta, ell, search_radius, opt);
  });
  mask.margins.assign(n, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    if (!found[i]) continue;
    mask.margins[i] = found[i]->delta_achieved;
    mask.member_ids.push_back(subset.id(i));
    mask.witnesses.push_back(std::move(*found[i]));
  }
  return mask;
}

StrainerNumber strainer_number(const Subset& subset, double delta, double ell, double search_radius, int max_k,
                               const StrainerSearch& opt) {
  StrainerNumber out;
  const auto order = spread_order(subset.size());
  constexpr std::size_t kChunk = 32;
  for (int k = 1; k <= max_k; ++k) {
    std::optional<Strainer> hit;
    for (std::size_t start = 0; start < order.size() && !hit; start += kChunk) {
      const std::size_t len = std::min(kChunk, order.size() - start);
      std::vector<std::optional<Strainer>> found(len);
      parallel::for_each_index(len, [&](std::size_t t) {
        found[t] = find_strainer(subset.space(), subset.id(order[start + t]), k, delta, ell, search_radius, opt);
      });
      for (auto& f : found)
        if (f) {
          hit = std::move(f);
          break;
        }
    }
    if (!hit) break;
    out.k = k;
    out.witnesses.push_back(std::move(*hit));
  }
  return out;
}

LocalStrainerNumber local_strainer_number(const Subset& subset, PointId p, double delta, std::vector<double> scales,
                                          int max_k, const StrainerSearch& opt) {
  if (scales.empty()) throw RefusalError("local strainer number needs at least one scale");
  if (!std::is_sorted(scales.begin(), scales.end(), std::greater<>()))
    throw RefusalError("scales must be given in descending order");
  const double h = subset.space().resolution_or(0.0);
  if (scales.back() < 4.0 * h * (1.0 - 1e-12)) throw RefusalError("scales must be at least 4h");
  LocalStrainerNumber out;
  out.scales = scales;
  for (const double r : scales) {
    Subset local(subset.space_ptr(), subset.ball(p, r), subset.link_radius(), subset.extremal_claim(), subset.name());
    out.profile.push_back(local.size() == 0 ? 0 : strainer_number(local, delta, r / 4.0, r / 2.0, max_k, opt).k);
  }
  out.value = out.profile.back();
  out.stable = out.profile.size() < 2 || out.profile[out.profile.size() - 2] == out.profile.back();
  return out;
}

RegularPoints regular_points(const Subset& subset, int m, std::vector<double> delta_schedule, double ell,
                             double search_radius, const StrainerSearch& opt) {
  if (delta_schedule.empty()) delta_schedule = {0.2, 0.1, 0.05};
  for (std::size_t i = 1; i < delta_schedule.size(); ++i)
    if (!(delta_schedule[i] < delta_schedule[i - 1])) throw RefusalError("delta schedule must be strictly descending");
  RegularPoints out;
  out.deltas = delta_schedule;
  std::vector<std::uint8_t> alive(subset.size(), 1);
  for (const double delta : delta_schedule) {
    ClassificationMask mask = classify(subset, m, delta, ell, search_radius, opt);
    ClassificationMask kept = mask;
    kept.member_ids.clear();
    kept.witnesses.clear();
    std::vector<std::uint8_t> now(subset.size(), 0);
    for (std::size_t t = 0; t < mask.member_ids.size(); ++t) {
      const auto i = static_cast<std::size_t>(subset.local_index(mask.member_ids[t]));
      if (!alive[i]) continue;
      now[i] = 1;
      kept.member_ids.push_back(mask.member_ids[t]);
      kept.witnesses.push_back(mask.witnesses[t]);
    }
    alive = now;
    out.masks.push_back(std::move(kept));
  }
  out.regular_ids = out.masks.back().member_ids;
  out.fraction = subset.size() == 0 ? 0.0 : static_cast<double>(out.regular_ids.size()) / static_cast<double>(subset.size());
  return out;
}

UnstrainedMass unstrained_mass(const Subset& subset, int m, int k, double delta, double ell, double eps,
                               double search_radius, const StrainerSearch& opt) {
  const double h = subset.space().resolution_or(0.0);
  if (eps < 2.0 * h * (1.0 - 1e-12)) throw RefusalError("eps must be at least twice the sampling resolution");
  const ClassificationMask mask = classify(subset, k, delta, ell, search_radius, opt);
  std::vector<std::uint8_t> member(subset.size(), 0);
  for (const PointId id : mask.member_ids) member[static_cast<std::size_t>(subset.local_index(id))] = 1;
  UnstrainedMass out;
  for (std::size_t i = 0; i < subset.size(); ++i)
    if (!member[i]) out.unstrained_ids.push_back(subset.id(i));
  out.beta = out.unstrained_ids.empty() ? 0 : packing(subset.space(), out.unstrained_ids, eps).count;
  out.value = std::pow(eps, m) * static_cast<double>(out.beta);
  return out;
}

}  // namespace alexkit
