#pragma once

#include "conflict/conflict.hpp"
#include "conflict/spherical.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace conflict {

/// Intersection of a complex with S(x0, eps), rescaled to unit directions.
struct RescaledSlice {
  Point x0;
  double eps = 0.0;
  std::vector<Point> directions;  // all sampled intersection directions

  // Intersection points lying on complex edges, with their link connectivity.
  struct Node {
    Point point;
    int a = -1;  // complex vertex ids of the cut edge (a == b for a vertex on the sphere)
    int b = -1;
    double t = 0.0;  // point = (1 - t) * v[a] + t * v[b]
  };
  std::vector<Node> nodes;
  std::vector<std::array<int, 2>> links;
};

inline constexpr int kArcSamplesPerTriangle = 8;
inline constexpr double kArcStep = 0.004;  // max angular gap between arc samples (radians)
inline constexpr double kMinSliceSpacings = 3.0;

/// Throws Error when eps is below 3 grid spacings or the sphere leaves the extraction window.
RescaledSlice sphere_slice(const ConflictComplex& complex, const Point& x0, double eps);

double directed_hausdorff(const std::vector<Point>& from, const std::vector<Point>& to,
                          int workers = 1);
/// Symmetric Hausdorff distance between finite clouds; throws Error on empty input.
double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b, int workers = 1);

struct ConeApprox {
  Point apex;
  std::vector<Point> directions;
};

struct TerritoryCheck {
  int samples = 0;
  int compared = 0;        // samples outside the boundary band
  double agreement = 0.0;  // fraction of compared samples classified alike
  double probe_radius = 0.0;

  // Fraction of directions at radius `cap_radius` landing in the interior of each territory.
  std::vector<int> sites;
  std::vector<double> interior_fraction;
  int cap_samples = 0;
  double cap_radius = 0.0;
};

struct TangentReport {
  Point x0;
  std::vector<double> eps;
  std::vector<double> d_to_spherical;
  std::vector<double> d_successive;
  bool monotone = false;
  bool final_within = false;
  std::string verdict;  // "PASS" / "FAIL" (empty for plain estimates)
  bool territory_pass = false;

  double r0 = 0.0;
  std::vector<int> achieving;
  std::vector<int> excluded_supports;
  int resolution = 0;
  double spacing = 0.0;
  double accept_tol = 0.0;
  TerritoryCheck territory;
};

/// Slices at each eps of a strictly decreasing schedule; the smallest slice is the estimate.
std::pair<ConeApprox, TangentReport> tangent_cone_estimate(const ConflictComplex& complex,
                                                           const Point& x0,
                                                           const std::vector<double>& schedule,
                                                           int workers = 1);

struct VerifyOptions {
  int resolution = 96;
  double accept_tol = 0.05;
  double jitter = 0.2;
  double window_factor = 1.25;  // half-width of the local window in units of max eps
  int sphere_resolution = 0;    // 0: default for the dimension
  int workers = 1;
  std::uint64_t seed = 1;
  int territory_samples = 500;
  double territory_radius = 1e-3;  // probe radius, relative to r0
  int cap_samples = 1000;
};

/// Non-increasing within a relative jitter.
bool non_increasing_with_jitter(const std::vector<double>& values, double jitter);

/// Compares rescaled slices of the conflict set near x0 against the spherical conflict set of
/// the supports, and spot-checks territory directions against the spherical territories.
TangentReport verify_tangent_cone(const Scene& scene, const Point& x0,
                                  const std::vector<double>& schedule,
                                  const VerifyOptions& options = {});

/// Territory directions at x0: Euclidean labels at radius `radius` vs geodesic labels of the
/// supports, ignoring directions whose geodesic margin is below `band`.
TerritoryCheck territory_directions(const Scene& scene, const SupportSet& support, int samples,
                                    double radius, double band, std::uint64_t seed);

/// Per site in `sites`: fraction of random directions u with x0 + radius u strictly inside Ter(X_i).
std::vector<double> territory_interior_fractions(const Scene& scene, const Point& x0,
                                                 const std::vector<int>& sites, int samples,
                                                 double radius, std::uint64_t seed);

/// Uniform random unit directions in the scene dimension.
std::vector<Point> random_directions(int dimension, int count, std::uint64_t seed);

}  // namespace conflict
