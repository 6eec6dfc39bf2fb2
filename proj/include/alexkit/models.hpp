#pragma once

// Sampled model spaces with ground-truth annotations.

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "alexkit/space.hpp"

namespace alexkit::models {

using Point2 = std::array<double, 2>;

/// Ground truth about one marked subset of a model.
struct ModelAnnotation {
  std::string subset;                         ///< the marked subset regular/singular ids refer to
  std::map<std::string, double> exact_measure;  ///< per subset name (and "area" where meaningful)
  std::vector<PointId> regular_ids;
  std::vector<PointId> singular_ids;
  std::map<std::string, double> notes;
};

struct Model {
  std::shared_ptr<Space> space;
  ModelAnnotation annotation;
};

/// A straight segment placed inside a polygon sample as an extra (non-extremal) subset.
struct PlantedSegment {
  Point2 a{};
  Point2 b{};
  std::string name = "planted";
};

struct PolygonOptions {
  std::optional<double> interior_h;  ///< lattice pitch of the interior (default h)
  std::optional<double> band;        ///< keep only interior points within this distance of the boundary
  bool interior = true;              ///< false: boundary sample only
  std::vector<PlantedSegment> planted;
  std::string name = "polygon";
};

/// Filled strictly convex polygon: boundary sampled per edge at pitch <= h
/// (ids 0.. in arc order starting at the first vertex), interior on a
/// triangular lattice away from the boundary. Subset "boundary" is extremal.
Model convex_polygon(std::vector<Point2> vertices, double h, const PolygonOptions& opt = {});

/// Regular n-gon inscribed in the circle of the given radius, first vertex at angle `rotation`.
std::vector<Point2> regular_polygon_vertices(int n, double radius, double rotation = 0.0);

Model regular_polygon(int n, double radius, double h, double rotation = 0.0, PolygonOptions opt = {});

/// Axis-parallel square [0, side]^2.
Model square(double side, double h, PolygonOptions opt = {});

/// Segment [0, length] in R^1. Subsets "segment" (all points) and "endpoints".
Model segment(double length, double h);

/// Circle of the given length with its arc metric (kappa = 1), pitch <= h.
Model circle(double length, double h);

/// Two points at distance `d` (kappa = 1 when d <= pi).
Model two_points(double d);

/// Metric cone of total angle theta up to `radius`; id 0 is the vertex.
/// Subset "vertex" is marked extremal iff theta <= pi.
Model cone(double theta, double radius, double h);

/// Double of the square [0, side]^2 glued along its boundary, with exact
/// distances. Corners form the one-point extremal subsets "corner0".."corner3".
Model pillow(double side, double h);

/// Spherical suspension of `base` (kappa >= 1, diameter <= pi) with latitude pitch <= h.
/// Ids 0 and 1 are the poles at s = 0 and s = pi.
Model spherical_suspension(const Space& base, double h);

/// Exact distance on the pillow between two points given as (x, y, sheet).
double pillow_distance(double side, const std::array<double, 3>& a, const std::array<double, 3>& b);

}  // namespace alexkit::models
