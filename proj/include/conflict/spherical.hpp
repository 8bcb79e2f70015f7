#pragma once

#include "conflict/conflict.hpp"
#include "conflict/scene.hpp"

#include <array>
#include <string>
#include <vector>

namespace conflict {

struct DistanceProfile {
  double r0 = 0.0;
  std::vector<int> achieving;  // sites with d(x0, X_i) <= r0 + tie_tol
};

/// r0 = min_i d(x0, X_i). Throws Error when x0 lies inside a site.
DistanceProfile min_distance_profile(const Scene& scene, const Point& x0,
                                     double tie_tol = kTieTolerance);

/// Support of one site: X_i intersected with the sphere S(x0, r0), kept as unit directions.
/// At the minimal radius the support is the set of foot points of x0 on X_i, so it is a
/// finite direction set except for a sphere primitive centered at x0 (the whole sphere).
struct SiteSupport {
  int site = 0;
  std::string id;
  std::vector<Point> points;   // support directions
  bool whole_sphere = false;
  std::vector<Point> samples;  // points on S(x0, r0)

  bool empty() const { return points.empty() && !whole_sphere; }
  /// Geodesic distance from the unit direction u to this support.
  double geodesic_distance_to(const Point& u) const;
};

struct SupportSet {
  Point x0;
  double r0 = 0.0;
  int dimension = 2;
  std::vector<SiteSupport> sites;  // one entry per scene site, scene order

  std::vector<int> nonempty() const;
  std::vector<int> excluded() const;
};

inline constexpr int kCircleSamples = 256;
inline constexpr int kSphereSamples = 2562;  // icosphere level 4

SupportSet support_sets(const Scene& scene, const Point& x0);

/// Great-circle distance arccos(u . v); throws Error for non-unit input.
double geodesic_distance(const Point& u, const Point& v);

/// Conflict set of the supports on the unit sphere (geodesic metric), centered at the origin.
struct SphericalComplex {
  int dimension = 2;  // ambient dimension: 2 -> points on S^1, 3 -> arcs on S^2
  std::vector<Point> vertices;
  std::vector<double> residuals;
  std::vector<SitePair> vertex_pairs;
  std::vector<std::array<int, 2>> arcs;
  std::vector<SitePair> arc_pairs;
};

struct SphericalOptions {
  /// S^1: number of angular samples. S^2: icosphere subdivision level.
  int resolution = 0;
};

int default_spherical_resolution(int dimension);

/// Unit-sphere vertices and triangles of a subdivided icosahedron.
struct Icosphere {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> faces;
};
Icosphere make_icosphere(int level);

SphericalComplex spherical_conflict(const SupportSet& support, const SphericalOptions& options = {});

/// Labels a unit direction by nearest support (geodesic metric).
TerritoryLabel spherical_label(const SupportSet& support, const Point& u,
                               double tie_tol = kTieTolerance);

/// { x0 + r u } over every vertex direction u and radius r.
std::vector<Point> cone(const Point& x0, const SphericalComplex& spherical,
                        const std::vector<double>& radii);

/// Radial thickenings of the supports over [r0, r0 + eps], as segment sites along rays.
Scene annular_shadow(const SupportSet& support, double eps);

}  // namespace conflict
