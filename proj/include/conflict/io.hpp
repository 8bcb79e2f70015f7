#pragma once

#include "conflict/conflict.hpp"
#include "conflict/metrics.hpp"
#include "conflict/spherical.hpp"
#include "conflict/tangent.hpp"

#include <nlohmann/json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace conflict {

using json = nlohmann::ordered_json;

/// Planar edges chained into polylines per site pair; vertex ids in walking order.
struct Polyline {
  SitePair pair;
  std::vector<int> vertices;
};
std::vector<Polyline> chain_polylines(const ConflictComplex& complex);

/// Columns vx,vy,residual,pair_i,pair_j,polyline_id; one row per polyline vertex.
void write_complex_csv(const ConflictComplex& complex, std::ostream& out);
/// One group per site pair.
void write_complex_obj(const ConflictComplex& complex, std::ostream& out);
/// Residuals, flags and grid metadata accompanying the geometry.
json complex_sidecar(const ConflictComplex& complex);

/// Spherical conflict sets: CSV of unit vertices on S^1, OBJ polylines on S^2.
void write_spherical_csv(const SphericalComplex& spherical, std::ostream& out);
void write_spherical_obj(const SphericalComplex& spherical, std::ostream& out);

json to_json(const Point& p, int dimension);
json to_json(const SupportSet& support);
json to_json(const SphericalComplex& spherical);
json to_json(const TangentReport& report, int dimension);
json to_json(const EmbeddingReport& report);
json to_json(const NoCuspReport& report);
json to_json(const DimensionReport& report);

/// Writes `text` to `path`; throws Error when the file cannot be written.
void write_file(const std::string& path, const std::string& text);

}  // namespace conflict
