#pragma once

#include "conflict/scene.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace conflict {

inline constexpr double kTieTolerance = 1e-9;
inline constexpr double kResidualTolerance = 1e-9;
inline constexpr double kMinimalityTolerance = 1e-8;
inline constexpr int kMaxEdgeBisections = 80;

struct TerritoryLabel {
  std::vector<int> argmin;  // ascending site indices
  double min_distance = 0.0;
  double margin = 0.0;  // second smallest minus smallest distance
  bool contains(int i) const;
};

std::vector<double> site_distances(const Scene& scene, const Point& x);

/// Nearest-site label of x. argmin = { i : d_i <= min + tie_tol }.
TerritoryLabel label(const Scene& scene, const Point& x, double tie_tol = kTieTolerance);

/// Unordered site pair, stored with i < j.
struct SitePair {
  int i = 0;
  int j = 0;
  static SitePair of(int a, int b) { return a < b ? SitePair{a, b} : SitePair{b, a}; }
  bool operator==(const SitePair&) const = default;
  auto operator<=>(const SitePair&) const = default;
};

/// Edge (v[2] == -1) or triangle separating the territories of `pair`.
struct Cell {
  std::array<int, 3> v{-1, -1, -1};
  SitePair pair;
  int arity() const { return v[2] < 0 ? 2 : 3; }
};

enum class CellFlag { ambiguous, junction };

struct FlaggedCell {
  std::array<int, 3> grid_index{0, 0, 0};
  CellFlag kind = CellFlag::ambiguous;
};

struct ConflictComplex {
  int dimension = 2;
  std::vector<Point> vertices;
  std::vector<double> residuals;
  std::vector<Cell> cells;
  std::vector<std::vector<int>> adjacency;  // cell -> neighboring cells
  std::vector<FlaggedCell> flags;

  Window window;
  int resolution = 0;
  double spacing = 0.0;  // largest grid step; 0 for synthetic complexes
  Metric metric = Metric::euclidean;
  /// Area (volume) fraction of grid cells whose corners are all ties.
  double tie_area_fraction = 0.0;

  bool empty() const { return cells.empty(); }
};

/// Builds a complex from explicit geometry (residuals zero, adjacency filled in).
ConflictComplex make_complex(int dimension, std::vector<Point> vertices, std::vector<Cell> cells,
                             double spacing = 0.0);

/// Cells sharing a vertex (edges) or an edge (triangles) become adjacent.
void compute_adjacency(ConflictComplex& complex);

struct ExtractOptions {
  int resolution = 128;
  int workers = 1;
  double tie_tol = kTieTolerance;
};

ConflictComplex extract_conflict_2d(const Scene& scene, const Window& window,
                                    const ExtractOptions& options);
ConflictComplex extract_conflict_3d(const Scene& scene, const Window& window,
                                    const ExtractOptions& options);
/// Dispatches on the scene dimension.
ConflictComplex extract_conflict(const Scene& scene, const Window& window,
                                 const ExtractOptions& options);

/// Bisection for d_i - d_j = 0 on the segment [a, b]; throws Error without a sign change.
Point refine_point(const Scene& scene, const Point& a, const Point& b, SitePair pair,
                   double tol = 1e-12, int max_iter = 100);

/// Window of half-width `half` around `center` in the scene dimension.
Window window_around(const Point& center, double half, int dimension);

/// Parses "xmin,xmax,ymin,ymax[,zmin,zmax]".
Window parse_window(const std::vector<double>& values, int dimension);

}  // namespace conflict
