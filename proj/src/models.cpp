#include "alexkit/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "alexkit/error.hpp"
#include "alexkit/parallel.hpp"

namespace alexkit::models {
namespace {

constexpr double kPi = std::numbers::pi;

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double norm2(double x, double y) { return std::hypot(x, y); }

double segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double vx = b[0] - a[0], vy = b[1] - a[1];
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm2(p[0] - a[0] - t * vx, p[1] - a[1] - t * vy);
}

double polygon_perimeter(const std::vector<Point2>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    s += norm2(b[0] - a[0], b[1] - a[1]);
  }
  return s;
}

double polygon_area(const std::vector<Point2>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    s += a[0] * b[1] - a[1] * b[0];
  }
  return std::abs(s) / 2.0;
}

}  // namespace

std::vector<Point2> regular_polygon_vertices(int n, double radius, double rotation) {
  if (n < 3) throw RefusalError("a polygon needs at least 3 vertices");
  std::vector<Point2> v;
  for (int i = 0; i < n; ++i) {
    const double a = rotation + 2.0 * kPi * i / n;
    v.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return v;
}

Model convex_polygon(std::vector<Point2> vertices, double h, const PolygonOptions& opt) {
  if (!(h > 0.0)) throw RefusalError("sampling pitch h must be positive");
  const std::size_t nv = vertices.size();
  if (nv < 3) throw RefusalError("a polygon needs at least 3 vertices");
  double orient = 0.0;
  for (std::size_t i = 0; i < nv; ++i) {
    const double c = cross(vertices[i], vertices[(i + 1) % nv], vertices[(i + 2) % nv]);
    if (c == 0.0 || (orient != 0.0 && (c > 0.0) != (orient > 0.0)))
      throw RefusalError("polygon vertices are not strictly convex");
    orient = c;
  }
  if (orient < 0.0) {
    // Keep vertex 0 first, walk the other way.
    std::reverse(vertices.begin() + 1, vertices.end());
  }
  const double hi = opt.interior_h.value_or(h);
  if (!(hi > 0.0)) throw RefusalError("interior pitch must be positive");

  std::vector<double> coords;
  std::vector<PointId> boundary, corners;
  for (std::size_t e = 0; e < nv; ++e) {
    const Point2& a = vertices[e];
    const Point2& b = vertices[(e + 1) % nv];
    const double len = norm2(b[0] - a[0], b[1] - a[1]);
    const auto k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(len / h - 1e-9)));
    for (std::int64_t j = 0; j < k; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(k);
      const auto id = static_cast<PointId>(coords.size() / 2);
      if (j == 0) corners.push_back(id);
      boundary.push_back(id);
      coords.push_back(a[0] + t * (b[0] - a[0]));
      coords.push_back(a[1] + t * (b[1] - a[1]));
    }
  }

  auto boundary_distance = [&](const Point2& p) {
    double d = kInf;
    for (std::size_t e = 0; e < nv; ++e) d = std::min(d, segment_distance(p, vertices[e], vertices[(e + 1) % nv]));
    return d;
  };
  auto inside = [&](const Point2& p) {
    for (std::size_t e = 0; e < nv; ++e)
      if (cross(vertices[e], vertices[(e + 1) % nv], p) < 0.0) return false;
    return true;
  };

  std::vector<std::pair<std::string, std::vector<PointId>>> planted;
  std::vector<Point2> planted_pts;
  for (const auto& seg : opt.planted) {
    if (!inside(seg.a) || !inside(seg.b)) throw RefusalError("planted segment leaves the polygon");
    const double len = norm2(seg.b[0] - seg.a[0], seg.b[1] - seg.a[1]);
    const auto k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(len / h - 1e-9)));
    std::vector<PointId> ids;
    for (std::int64_t j = 0; j <= k; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(k);
      const Point2 p{seg.a[0] + t * (seg.b[0] - seg.a[0]), seg.a[1] + t * (seg.b[1] - seg.a[1])};
      ids.push_back(static_cast<PointId>(coords.size() / 2));
      coords.push_back(p[0]);
      coords.push_back(p[1]);
      planted_pts.push_back(p);
    }
    planted.emplace_back(seg.name, std::move(ids));
  }

  if (opt.interior) {
    double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
    for (const auto& v : vertices) {
      xmin = std::min(xmin, v[0]);
      xmax = std::max(xmax, v[0]);
      ymin = std::min(ymin, v[1]);
      ymax = std::max(ymax, v[1]);
    }
    const double dy = hi * std::sqrt(3.0) / 2.0;
    const auto rows = static_cast<std::int64_t>(std::floor((ymax - ymin) / dy)) + 1;
    const auto cols = static_cast<std::int64_t>(std::floor((xmax - xmin) / hi)) + 2;
    // Lattice rows are independent; collect per row and concatenate in order.
    std::vector<std::vector<double>> row_pts(static_cast<std::size_t>(rows));
    parallel::for_each_index(static_cast<std::size_t>(rows), [&](std::size_t j) {
      const double y = ymin + static_cast<double>(j) * dy;
      const double off = (j % 2 == 1) ? hi / 2.0 : 0.0;
      for (std::int64_t i = 0; i < cols; ++i) {
        const Point2 p{xmin + off + static_cast<double>(i) * hi, y};
        if (!inside(p)) continue;
        const double bd = boundary_distance(p);
        if (bd < h / 2.0) continue;
        if (opt.band && bd > *opt.band) continue;
        bool clash = false;
        for (const auto& q : planted_pts)
          if (norm2(p[0] - q[0], p[1] - q[1]) < h / 2.0) {
            clash = true;
            break;
          }
        if (clash) continue;
        row_pts[j].push_back(p[0]);
        row_pts[j].push_back(p[1]);
      }
    });
    for (const auto& r : row_pts) coords.insert(coords.end(), r.begin(), r.end());
  }

  Model m;
  m.space = std::make_shared<Space>(Space::euclidean(opt.name, 2, std::move(coords), 0.0, std::max(h, opt.interior ? hi : h)));
  m.space->add_subset({"boundary", boundary, true});
  for (auto& [name, ids] : planted) m.space->add_subset({name, ids, false});

  const double perimeter = polygon_perimeter(vertices);
  m.annotation.subset = "boundary";
  m.annotation.exact_measure["boundary"] = perimeter;
  m.annotation.exact_measure["area"] = polygon_area(vertices);
  m.annotation.singular_ids = corners;
  for (const PointId b : boundary) {
    double dc = kInf;
    for (const PointId c : corners) dc = std::min(dc, m.space->dist(b, c));
    if (dc > 2.0 * h) m.annotation.regular_ids.push_back(b);
  }
  m.annotation.notes["vertices"] = static_cast<double>(nv);
  m.annotation.notes["h"] = h;
  for (const auto& seg : opt.planted)
    m.annotation.exact_measure[seg.name] = norm2(seg.b[0] - seg.a[0], seg.b[1] - seg.a[1]);
  return m;
}

Model regular_polygon(int n, double radius, double h, double rotation, PolygonOptions opt) {
  if (opt.name == "polygon") opt.name = "regular-" + std::to_string(n) + "-gon";
  return convex_polygon(regular_polygon_vertices(n, radius, rotation), h, opt);
}

Model square(double side, double h, PolygonOptions opt) {
  if (opt.name == "polygon") opt.name = "square";
  return convex_polygon({{0.0, 0.0}, {side, 0.0}, {side, side}, {0.0, side}}, h, opt);
}

Model segment(double length, double h) {
  if (!(length > 0.0) || !(h > 0.0)) throw RefusalError("segment needs positive length and pitch");
  const auto k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(length / h - 1e-9)));
  std::vector<double> coords;
  for (std::int64_t i = 0; i <= k; ++i) coords.push_back(length * static_cast<double>(i) / static_cast<double>(k));
  Model m;
  m.space = std::make_shared<Space>(Space::euclidean("segment", 1, std::move(coords), 0.0, h));
  std::vector<PointId> all(static_cast<std::size_t>(k + 1));
  std::iota(all.begin(), all.end(), 0);
  m.space->add_subset({"segment", all, true});
  m.space->add_subset({"endpoints", {0, static_cast<PointId>(k)}, true});
  m.annotation.subset = "segment";
  m.annotation.exact_measure["segment"] = length;
  m.annotation.singular_ids = {0, static_cast<PointId>(k)};
  for (const PointId p : all) {
    const double x = m.space->coord(p)[0];
    if (x > 2.0 * h && length - x > 2.0 * h) m.annotation.regular_ids.push_back(p);
  }
  return m;
}

Model circle(double length, double h) {
  if (!(length > 0.0) || !(h > 0.0)) throw RefusalError("circle needs positive length and pitch");
  const auto n = std::max<std::int64_t>(3, static_cast<std::int64_t>(std::ceil(length / h - 1e-9)));
  const auto N = static_cast<std::size_t>(n);
  std::vector<double> mat(N * N, 0.0), coords;
  const double rad = length / (2.0 * kPi);
  for (std::size_t i = 0; i < N; ++i) {
    const double a = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    coords.push_back(rad * std::cos(a));
    coords.push_back(rad * std::sin(a));
    for (std::size_t j = 0; j < N; ++j) {
      const std::size_t k = i > j ? i - j : j - i;
      const std::size_t w = std::min(k, N - k);
      mat[i * N + j] = length * static_cast<double>(w) / static_cast<double>(n);
    }
  }
  Model m;
  m.space = std::make_shared<Space>(Space::from_matrix("circle", 1.0, N, std::move(mat), h));
  m.space->set_coords(2, std::move(coords));
  std::vector<PointId> all(N);
  std::iota(all.begin(), all.end(), 0);
  m.space->add_subset({"circle", all, true});
  m.annotation.subset = "circle";
  m.annotation.exact_measure["circle"] = length;
  m.annotation.regular_ids = all;
  return m;
}

Model two_points(double d) {
  if (!(d > 0.0)) throw RefusalError("two points need a positive distance");
  Model m;
  m.space = std::make_shared<Space>(Space::from_matrix("two-points", 1.0, 2, {0.0, d, d, 0.0}));
  m.space->add_subset({"points", {0, 1}, true});
  m.annotation.subset = "points";
  m.annotation.regular_ids = {0, 1};
  return m;
}

Model cone(double theta, double radius, double h) {
  if (!(theta > 0.0) || theta > 2.0 * kPi + 1e-12) throw RefusalError("cone angle must lie in (0, 2*pi]");
  if (!(radius > 0.0) || !(h > 0.0)) throw RefusalError("cone needs positive radius and pitch");
  struct Polar {
    double s, phi;
  };
  std::vector<Polar> pts{{0.0, 0.0}};
  const auto rings = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(radius / h - 1e-9)));
  for (std::int64_t i = 1; i <= rings; ++i) {
    const double s = radius * static_cast<double>(i) / static_cast<double>(rings);
    const auto c = std::max<std::int64_t>(3, static_cast<std::int64_t>(std::ceil(theta * s / h - 1e-9)));
    for (std::int64_t j = 0; j < c; ++j) pts.push_back({s, theta * static_cast<double>(j) / static_cast<double>(c)});
  }
  const std::size_t n = pts.size();
  std::vector<double> mat(n * n, 0.0), coords;
  for (const auto& p : pts) {
    coords.push_back(p.s * std::cos(p.phi));
    coords.push_back(p.s * std::sin(p.phi));
  }
  parallel::for_each_index(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dphi = std::abs(pts[i].phi - pts[j].phi);
      const double g = std::min({dphi, theta - dphi, kPi});
      const double sh = std::sin(g / 2.0);
      const double ds = pts[i].s - pts[j].s;
      mat[i * n + j] = std::sqrt(ds * ds + 4.0 * pts[i].s * pts[j].s * sh * sh);
    }
  });
  // Enforce exact symmetry: i < j computed first wins.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) mat[j * n + i] = mat[i * n + j];
  Model m;
  m.space = std::make_shared<Space>(Space::from_matrix("cone", 0.0, n, std::move(mat), h));
  m.space->set_coords(2, std::move(coords));
  const bool extremal = theta <= kPi + 1e-12;
  m.space->add_subset({"vertex", {0}, extremal});
  m.annotation.subset = "vertex";
  m.annotation.notes["cone_angle"] = theta;
  m.annotation.notes["vertex_direction_diameter"] = std::min(theta / 2.0, kPi);
  m.annotation.exact_measure["area"] = theta * radius * radius / 2.0;
  if (theta < 2.0 * kPi - 1e-12) m.annotation.singular_ids = {0};
  else m.annotation.regular_ids = {0};
  return m;
}

double pillow_distance(double side, const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double direct = norm2(a[0] - b[0], a[1] - b[1]);
  if (a[2] == 0.0 || b[2] == 0.0 || a[2] == b[2]) return direct;
  // Opposite sheets: the path crosses one edge once; minimize over each edge.
  // |x - z| + |z - y| is convex along the edge, so clamping the reflected
  // line's crossing point gives the edge minimum.
  double best = kInf;
  for (int e = 0; e < 4; ++e) {
    const int axis = e % 2;            // 0: vertical edge x = c, 1: horizontal edge y = c
    const double c = e < 2 ? 0.0 : side;
    const int other = 1 - axis;
    const double ra = a[static_cast<std::size_t>(axis)] - c;
    const double rb = -(b[static_cast<std::size_t>(axis)] - c);  // reflected across the edge
    double t;
    if (ra == rb) {
      t = (a[static_cast<std::size_t>(other)] + b[static_cast<std::size_t>(other)]) / 2.0;
    } else {
      const double lam = ra / (ra - rb);
      t = a[static_cast<std::size_t>(other)] +
          lam * (b[static_cast<std::size_t>(other)] - a[static_cast<std::size_t>(other)]);
    }
    t = std::clamp(t, 0.0, side);
    std::array<double, 2> z{};
    z[static_cast<std::size_t>(axis)] = c;
    z[static_cast<std::size_t>(other)] = t;
    const double len = norm2(a[0] - z[0], a[1] - z[1]) + norm2(z[0] - b[0], z[1] - b[1]);
    best = std::min(best, len);
  }
  return best;
}

Model pillow(double side, double h) {
  if (!(side > 0.0) || !(h > 0.0)) throw RefusalError("pillow needs positive side and pitch");
  const auto k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(side / h - 1e-9)));
  std::vector<std::array<double, 3>> pts;
  auto at = [&](std::int64_t i) { return side * static_cast<double>(i) / static_cast<double>(k); };
  // Seam first, walking the boundary from the origin counterclockwise.
  for (std::int64_t i = 0; i < k; ++i) pts.push_back({at(i), 0.0, 0.0});
  for (std::int64_t i = 0; i < k; ++i) pts.push_back({side, at(i), 0.0});
  for (std::int64_t i = k; i > 0; --i) pts.push_back({at(i), side, 0.0});
  for (std::int64_t i = k; i > 0; --i) pts.push_back({0.0, at(i), 0.0});
  const std::size_t seam = pts.size();
  for (const double sheet : {1.0, -1.0})
    for (std::int64_t j = 1; j < k; ++j)
      for (std::int64_t i = 1; i < k; ++i) pts.push_back({at(i), at(j), sheet});
  const std::size_t n = pts.size();
  std::vector<double> mat(n * n, 0.0), coords;
  for (const auto& p : pts) coords.insert(coords.end(), p.begin(), p.end());
  parallel::for_each_index(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) mat[i * n + j] = pillow_distance(side, pts[i], pts[j]);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) mat[j * n + i] = mat[i * n + j];
  Model m;
  m.space = std::make_shared<Space>(Space::from_matrix("pillow", 0.0, n, std::move(mat), h));
  m.space->set_coords(3, std::move(coords));
  const auto K = static_cast<PointId>(k);
  const std::array<PointId, 4> corner_ids{0, K, 2 * K, 3 * K};
  for (int c = 0; c < 4; ++c) m.space->add_subset({"corner" + std::to_string(c), {corner_ids[static_cast<std::size_t>(c)]}, true});
  std::vector<PointId> seam_ids(seam);
  std::iota(seam_ids.begin(), seam_ids.end(), 0);
  m.space->add_subset({"seam", seam_ids, false});
  m.annotation.subset = "corner0";
  m.annotation.regular_ids = {corner_ids[0]};
  m.annotation.exact_measure["area"] = 2.0 * side * side;
  m.annotation.notes["corner_cone_angle"] = kPi;
  return m;
}

Model spherical_suspension(const Space& base, double h) {
  if (base.kappa() < 1.0) throw RefusalError("suspension base needs kappa >= 1");
  if (!(h > 0.0)) throw RefusalError("suspension needs a positive pitch");
  const std::size_t nb = base.size();
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      if (base.dist(static_cast<PointId>(i), static_cast<PointId>(j)) > kPi + 1e-9)
        throw DomainError("suspension base has diameter > pi");
  const auto L = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(kPi / h - 1e-9)));
  struct Pt {
    double s;
    PointId x;
  };
  std::vector<Pt> pts{{0.0, -1}, {kPi, -1}};
  for (std::int64_t i = 1; i < L; ++i)
    for (std::size_t b = 0; b < nb; ++b)
      pts.push_back({kPi * static_cast<double>(i) / static_cast<double>(L), static_cast<PointId>(b)});
  const std::size_t n = pts.size();
  std::vector<double> mat(n * n, 0.0);
  parallel::for_each_index(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = pts[i].s, t = pts[j].s;
      const double db = (pts[i].x < 0 || pts[j].x < 0) ? 0.0 : base.dist(pts[i].x, pts[j].x);
      // Haversine form and its complement, combined through atan2 for accuracy near 0 and pi.
      const double ss = std::sin(s) * std::sin(t);
      const double hd = std::sin((s - t) / 2.0), hb = std::sin(db / 2.0);
      const double cd = std::cos((s + t) / 2.0), cb = std::cos(db / 2.0);
      const double A = hd * hd + ss * hb * hb;
      const double B = cd * cd + ss * cb * cb;
      mat[i * n + j] = 2.0 * std::atan2(std::sqrt(std::max(0.0, A)), std::sqrt(std::max(0.0, B)));
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) mat[j * n + i] = mat[i * n + j];
  Model m;
  m.space = std::make_shared<Space>(Space::from_matrix("suspension(" + base.name() + ")", 1.0, n, std::move(mat), h));
  m.space->add_subset({"poles", {0, 1}, false});
  m.annotation.subset = "poles";
  m.annotation.notes["latitudes"] = static_cast<double>(L - 1);
  return m;
}

}  // namespace alexkit::models
