#pragma once

#include "conflict/conflict.hpp"
#include "conflict/tangent.hpp"

#include <array>
#include <string>
#include <vector>

namespace conflict {

inline constexpr double kGraphSnap = 1e-7;

/// 1-skeleton of a complex with Euclidean edge lengths; vertices closer than 1e-7 are merged.
struct GeodesicGraph {
  struct Edge {
    int to;
    double w;
  };
  std::vector<Point> nodes;
  std::vector<int> vertex_node;  // complex vertex -> node
  std::vector<std::vector<Edge>> adjacency;
  std::vector<std::array<int, 2>> edges;  // unique, a < b
  std::vector<int> component;
  int components = 0;
  double reach = 0.0;  // query points farther than this from the graph are rejected

  static GeodesicGraph build(const ConflictComplex& complex);
};

/// Location of a point on the graph: the closest edge and the parameter along it.
struct GraphLocation {
  int a = -1;
  int b = -1;
  double t = 0.0;
  double offset = 0.0;  // distance from the query point to the graph
  Point point;
};

GraphLocation locate(const GeodesicGraph& graph, const Point& p);

/// Shortest path length inside the graph between p and q (projected onto the nearest edges);
/// infinity across components. Throws Error when a point is farther than graph.reach.
double inner_distance(const GeodesicGraph& graph, const Point& p, const Point& q);

/// Distances from a located point to every node.
std::vector<double> graph_distances_from(const GeodesicGraph& graph, const GraphLocation& from);

struct ProbePair {
  Point p;
  Point q;
  double inner = 0.0;
  double outer = 0.0;
  double ratio = 0.0;
};

struct EmbeddingScale {
  double theta = 0.0;
  double radius = 0.0;  // probe radius 2 sin(theta / 2)
  int link_components = 0;
  int candidates = 0;
  std::vector<ProbePair> pairs;
  double ratio = 0.0;  // max over pairs
};

struct EmbeddingReport {
  Point x0;
  std::vector<EmbeddingScale> scales;
  std::vector<double> growth;  // ratio[k] / ratio[k - 1]
  std::string verdict;         // "diverging" or "embedded"
};

struct EmbeddingOptions {
  int pairs = 64;
  double growth_threshold = 1.5;
  int workers = 1;
};

/// Probes inner/outer distance ratios on the link of x0 at radii 2 sin(theta / 2).
/// Pairs straddle different link components when the link is disconnected.
EmbeddingReport embedding_scan(const GeodesicGraph& graph, const ConflictComplex& complex,
                               const Point& x0, const std::vector<double>& thetas,
                               const EmbeddingOptions& options = {});

struct BranchTangents {
  std::vector<Point> directions;  // smallest-eps cluster means
  std::vector<int> sizes;         // slice directions per cluster at the smallest eps
  std::vector<int> counts;        // cluster count per eps
};

inline constexpr double kBranchLinkageDeg = 10.0;
inline constexpr double kNoCuspMinAngleDeg = 2.0;

/// Clusters slice directions of a planar complex around y0; throws Error("unresolved
/// branching") when the cluster count differs between the last two radii.
BranchTangents branch_tangents(const ConflictComplex& complex, const Point& y0,
                               const std::vector<double>& schedule,
                               double linkage_deg = kBranchLinkageDeg);

struct NoCuspReport {
  Point y0;
  std::vector<double> eps;
  BranchTangents branches;
  std::vector<double> gaps_deg;  // consecutive angles around the circle
  double min_angle_deg = 0.0;
  double threshold_deg = kNoCuspMinAngleDeg;
  std::string verdict;
};

struct NoCuspOptions {
  int resolution = 96;
  double window_factor = 1.25;
  double min_angle_deg = kNoCuspMinAngleDeg;
  double linkage_deg = kBranchLinkageDeg;
  int workers = 1;
};

NoCuspReport no_cusp_check(const Scene& scene, const Point& y0,
                           const std::vector<double>& schedule, const NoCuspOptions& options = {});

/// Connected components of the slice of the complex with S(x0, eps); throws on an empty slice.
int link_components(const ConflictComplex& complex, const Point& x0, double eps);

struct DimensionReport {
  std::string verdict;
  int cells = 0;
  int wrong_dimension_cells = 0;
  int isolated_vertices = 0;
  int ambiguous_cells = 0;
  double tie_area_fraction = 0.0;
  std::string warning;
};

DimensionReport dimension_check(const ConflictComplex& complex);

/// Union of the planes x3 = x1 and x3 = -x1 over [-half, half] in-plane, sharing the
/// vertices on the x2 axis. `cells` per side must be even.
ConflictComplex make_transversal_planes_complex(double half = 0.6, int cells = 50);

/// Circles (x1 -+ 1)^2 + x2^2 = 1 as polylines sharing the origin.
ConflictComplex make_tangent_circles_complex(int segments = 2000);

}  // namespace conflict
