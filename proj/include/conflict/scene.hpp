#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace conflict {

/// Points are stored in R^3; planar scenes keep z = 0.
using Point = Eigen::Vector3d;

/// Base class of every error raised for bad input or an unusable configuration.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class SceneError : public Error {
 public:
  using Error::Error;
};

enum class Metric { euclidean, taxicab };

std::string_view to_string(Metric m);

struct PointPrim {
  Point coords;
};
struct PointSetPrim {
  std::vector<Point> points;
};
/// { x : normal . x = offset }, normal of unit length.
struct HyperplanePrim {
  Point normal;
  double offset;
};
struct SpherePrim {
  Point center;
  double radius;
};
struct BallPrim {
  Point center;
  double radius;
};
struct SegmentPrim {
  Point a;
  Point b;
};
struct BoxPrim {
  Point min;
  Point max;
};

using Primitive = std::variant<PointPrim, PointSetPrim, HyperplanePrim, SpherePrim, BallPrim,
                               SegmentPrim, BoxPrim>;

std::string_view primitive_type_name(const Primitive& p);

/// A closed set given as a finite union of primitives.
struct Site {
  std::string id;
  std::vector<Primitive> primitives;
};

/// Axis-aligned window; unused upper axes are [0, 0] for planar windows.
struct Window {
  Point lo = Point::Zero();
  Point hi = Point::Zero();
};

class Scene {
 public:
  /// Validates primitive invariants and pairwise disjointness; throws SceneError.
  Scene(int dimension, std::vector<Site> sites, Metric metric = Metric::euclidean);

  int dimension() const { return dimension_; }
  Metric metric() const { return metric_; }
  const std::vector<Site>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  const Site& site(std::size_t i) const { return sites_[i]; }

  /// Same sites, different metric (validation reused).
  Scene with_metric(Metric m) const;

 private:
  int dimension_;
  std::vector<Site> sites_;
  Metric metric_;
};

inline constexpr double kDisjointnessTolerance = 1e-9;
inline constexpr double kUnitNormalTolerance = 1e-12;

double distance(const Primitive& p, const Point& x, Metric metric = Metric::euclidean);
Point nearest_point(const Primitive& p, const Point& x);

double distance(const Site& site, const Point& x, Metric metric = Metric::euclidean);

/// Foot point realizing the Euclidean distance. Ties go to the first primitive in
/// declaration order, then to the lexicographically smallest candidate.
Point nearest_point(const Site& site, const Point& x);

/// Lower bound on the set distance between two primitives; exact for most pairs.
double primitive_separation(const Primitive& a, const Primitive& b, int dimension);
double site_separation(const Site& a, const Site& b, int dimension);

/// Parses the JSON scene format; throws ParseError or SceneError.
Scene parse_scene(std::string_view text);
Scene load_scene(const std::string& path);
std::string scene_to_json(const Scene& scene);

// ---------------------------------------------------------------------------
// Ball clipping.

/// Hyperplane intersected with a ball: a disk (3D) or a segment (2D).
struct ClippedDisk {
  Point center;
  Point normal;
  double radius;
  int dimension;
};

/// Sphere intersected with a ball: { c + R u : u . axis >= cos_limit }.
struct ClippedCap {
  Point center;
  double radius;
  Point axis;
  double cos_limit;
  int dimension;
};

/// Convex primitive (ball or box) intersected with a ball; distances via Dykstra projection.
struct ClippedConvex {
  Primitive shape;
  Point ball_center;
  double ball_radius;
};

using ClippedPrimitive =
    std::variant<PointPrim, PointSetPrim, SegmentPrim, ClippedDisk, ClippedCap, ClippedConvex>;

struct ClippedSite {
  std::string id;
  std::vector<ClippedPrimitive> pieces;
  bool empty() const { return pieces.empty(); }
};

class ClippedScene {
 public:
  ClippedScene(const Scene& base, Point center, double radius);

  const Scene& base() const { return base_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<ClippedSite>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }

  /// Distance to X_i intersected with the closed ball; +infinity for empty clips.
  double distance(std::size_t i, const Point& x) const;

 private:
  Scene base_;
  Point center_;
  double radius_;
  std::vector<ClippedSite> sites_;
};

/// Intersects every site with the closed ball of the given radius around x0.
ClippedScene clip_scene(const Scene& scene, const Point& x0, double radius);

double clipped_distance(const ClippedPrimitive& p, const Point& x);

}  // namespace conflict
