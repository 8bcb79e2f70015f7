#pragma once

// Scene builders and brute-force oracles shared by the test binaries. Oracles here are
// written independently of the library code paths they check.

#include "conflict/scene.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace testing_support {

using conflict::Point;
using conflict::Scene;
using conflict::Site;

inline Point p2(double x, double y) { return Point(x, y, 0.0); }

inline Site point_site(const std::string& id, const Point& p) {
  return Site{id, {conflict::PointPrim{p}}};
}

inline Scene two_points_2d() {
  return Scene(2, {point_site("east", p2(1, 0)), point_site("west", p2(-1, 0))});
}

inline Scene two_points_3d() {
  return Scene(3, {point_site("east", Point(1, 0, 0)), point_site("west", Point(-1, 0, 0))});
}

inline Scene points_2d(const std::vector<Point>& pts) {
  std::vector<Site> sites;
  for (std::size_t i = 0; i < pts.size(); ++i) sites.push_back(point_site("s" + std::to_string(i), pts[i]));
  return Scene(2, std::move(sites));
}

/// Unit-circle points at the given angles in degrees.
inline std::vector<Point> circle_points(const std::vector<double>& degrees) {
  std::vector<Point> out;
  for (double d : degrees) {
    const double t = d * std::numbers::pi / 180.0;
    out.push_back(p2(std::cos(t), std::sin(t)));
  }
  return out;
}

/// Planes x3 = +-1 against points (+-1, 0, 0).
inline Scene sheets_scene() {
  return Scene(3, {Site{"X1", {conflict::HyperplanePrim{Point(0, 0, 1), 1.0},
                               conflict::HyperplanePrim{Point(0, 0, 1), -1.0}}},
                   Site{"X2", {conflict::PointPrim{Point(1, 0, 0)}, conflict::PointPrim{Point(-1, 0, 0)}}}});
}

/// Focus (0, 0, 1) against the plane x3 = -1: paraboloid x3 = (x1^2 + x2^2) / 4.
inline Scene focus_plane_scene() {
  return Scene(3, {point_site("focus", Point(0, 0, 1)),
                   Site{"plane", {conflict::HyperplanePrim{Point(0, 0, 1), -1.0}}}});
}

// ---------------------------------------------------------------------------
// Oracles

/// Distance from x to the segment [a, b] by dense parameter sampling plus golden-section polish.
inline double brute_segment_distance(const Point& a, const Point& b, const Point& x) {
  const auto f = [&](double t) { return (a + t * (b - a) - x).norm(); };
  double best_t = 0.0, best = f(0.0);
  for (int k = 1; k <= 10000; ++k) {
    const double t = k / 10000.0;
    if (f(t) < best) {
      best = f(t);
      best_t = t;
    }
  }
  double lo = std::max(0.0, best_t - 1e-4), hi = std::min(1.0, best_t + 1e-4);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    if (f(m1) < f(m2)) hi = m2; else lo = m1;
  }
  return std::min(best, f(0.5 * (lo + hi)));
}

/// Quasi-uniform points on S^2 (Fibonacci lattice); independent of the library icosphere.
inline std::vector<Point> fibonacci_sphere(int n) {
  std::vector<Point> out;
  const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    out.push_back(Point(r * std::cos(ga * i), r * std::sin(ga * i), z));
  }
  return out;
}

/// Great-circle samples of { u : u3 = s * u1 } for s = +-1.
inline std::vector<Point> diagonal_great_circles(int per_circle) {
  std::vector<Point> out;
  for (double s : {1.0, -1.0}) {
    const Point a = Point(1, 0, s).normalized();
    const Point b(0, 1, 0);
    for (int k = 0; k < per_circle; ++k) {
      const double t = 2.0 * std::numbers::pi * k / per_circle;
      out.push_back(std::cos(t) * a + std::sin(t) * b);
    }
  }
  return out;
}

inline double angle(const Point& u, const Point& v) {
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

/// Directions where two closest targets are within `band` geodesically, by brute-force labeling.
inline std::vector<Point> brute_geodesic_boundary(const std::vector<std::vector<Point>>& targets,
                                                  const std::vector<Point>& samples, double band) {
  std::vector<Point> out;
  for (const auto& u : samples) {
    std::vector<double> d;
    for (const auto& t : targets) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : t) best = std::min(best, angle(u, p));
      d.push_back(best);
    }
    std::sort(d.begin(), d.end());
    if (d.size() >= 2 && d[1] - d[0] <= band) out.push_back(u);
  }
  return out;
}

/// Sup over a of min over b of |a - b| (no shortcuts).
inline double brute_directed_hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
  double worst = 0.0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : b) best = std::min(best, (p - q).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

/// Circumcenter of a planar triangle.
inline Point circumcenter(const Point& a, const Point& b, const Point& c) {
  const double d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
  const double a2 = a.squaredNorm(), b2 = b.squaredNorm(), c2 = c.squaredNorm();
  return p2((a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d,
            (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d);
}

/// Branch direction of the (i, j) bisector leaving the junction away from the third site k.
inline Point bisector_branch(const Point& pi, const Point& pj, const Point& pk) {
  Point d = p2(-(pj - pi)[1], (pj - pi)[0]).normalized();
  if (d.dot(pi - pk) < 0.0) d = -d;
  return d;
}

struct Junction {
  Point center;
  std::array<int, 3> triple;
  double feature;  // radius around the center where only its three branches exist
};

struct RandomJunctionScene {
  std::vector<Point> sites;
  std::vector<Junction> junctions;
};

inline constexpr double kJunctionMinAngleDeg = 12.0;

/// Random n-point scene in [-1, 1]^2 together with its Voronoi vertices found by brute force.
/// Vertices whose branches are closer than 12 degrees (the 10 degree clustering linkage plus a
/// noise margin) or that are nearly cocircular with a fourth site cause the scene to be redrawn.
inline RandomJunctionScene random_junction_scene(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  while (true) {
    RandomJunctionScene out;
    for (int i = 0; i < n; ++i) out.sites.push_back(p2(coord(rng), coord(rng)));
    const auto& pts = out.sites;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      for (int j = i + 1; j < n && ok; ++j) ok = (pts[i] - pts[j]).norm() > 0.3;
    }
    for (int a = 0; a < n && ok; ++a) {
      for (int b = a + 1; b < n && ok; ++b) {
        for (int c = b + 1; c < n && ok; ++c) {
          const Point o = circumcenter(pts[a], pts[b], pts[c]);
          const double r = (o - pts[a]).norm();
          if (!std::isfinite(r) || r > 3.0) continue;
          double others = std::numeric_limits<double>::infinity();
          for (int m = 0; m < n; ++m) {
            if (m != a && m != b && m != c) others = std::min(others, (o - pts[m]).norm());
          }
          if (others < r) continue;  // not a Voronoi vertex
          if (others < r + 0.05) {
            ok = false;
            break;
          }
          const Point d1 = bisector_branch(pts[a], pts[b], pts[c]);
          const Point d2 = bisector_branch(pts[a], pts[c], pts[b]);
          const Point d3 = bisector_branch(pts[b], pts[c], pts[a]);
          const double min_angle = std::min({angle(d1, d2), angle(d1, d3), angle(d2, d3)});
          if (min_angle < kJunctionMinAngleDeg * std::numbers::pi / 180.0) {
            ok = false;
            break;
          }
          // Along a branch a fourth site can only take over after (others - r) / 2.
          out.junctions.push_back({o, {a, b, c}, std::min(0.5 * (others - r), 0.5)});
        }
      }
    }
    if (ok && !out.junctions.empty()) return out;
  }
}

/// Oracle branch directions at a junction, from the three pairwise bisectors.
inline std::array<Point, 3> junction_branches(const RandomJunctionScene& s, const Junction& j) {
  const auto& p = s.sites;
  const auto [a, b, c] = j.triple;
  return {bisector_branch(p[a], p[b], p[c]), bisector_branch(p[a], p[c], p[b]),
          bisector_branch(p[b], p[c], p[a])};
}

}  // namespace testing_support
