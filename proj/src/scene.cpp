#include "conflict/scene.hpp"

#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace conflict {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFootTieTolerance = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool lex_less(const Point& a, const Point& b) {
  for (int k = 0; k < 3; ++k) {
    if (a[k] < b[k]) return true;
    if (a[k] > b[k]) return false;
  }
  return false;
}

Point project_segment(const Point& a, const Point& b, const Point& x) {
  const Point ab = b - a;
  const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return a + t * ab;
}

Point project_box(const BoxPrim& box, const Point& x) {
  return x.cwiseMax(box.min).cwiseMin(box.max);
}

Point project_ball(const Point& c, double r, const Point& x) {
  const Point d = x - c;
  const double n = d.norm();
  if (n <= r) return x;
  return c + (r / n) * d;
}

Point project_hyperplane(const HyperplanePrim& h, const Point& x) {
  return x - (h.normal.dot(x) - h.offset) * h.normal;
}

// Projection onto one of the convex primitives.
Point project_convex(const Primitive& p, const Point& x) {
  return std::visit(
      overloaded{
          [&](const PointPrim& q) -> Point { return q.coords; },
          [&](const HyperplanePrim& q) -> Point { return project_hyperplane(q, x); },
          [&](const BallPrim& q) -> Point { return project_ball(q.center, q.radius, x); },
          [&](const SegmentPrim& q) -> Point { return project_segment(q.a, q.b, x); },
          [&](const BoxPrim& q) -> Point { return project_box(q, x); },
          [&](const auto&) -> Point { throw Error("primitive is not convex"); },
      },
      p);
}

// Supremum of |c - y| over a convex primitive y (infinite for hyperplanes).
double far_distance(const Primitive& p, const Point& c) {
  return std::visit(
      overloaded{
          [&](const PointPrim& q) { return (q.coords - c).norm(); },
          [&](const HyperplanePrim&) { return kInf; },
          [&](const BallPrim& q) { return (q.center - c).norm() + q.radius; },
          [&](const SegmentPrim& q) { return std::max((q.a - c).norm(), (q.b - c).norm()); },
          [&](const BoxPrim& q) {
            double best = 0.0;
            for (int k = 0; k < 3; ++k) {
              const double d = std::max(std::abs(q.min[k] - c[k]), std::abs(q.max[k] - c[k]));
              best += d * d;
            }
            return std::sqrt(best);
          },
          [&](const auto&) -> double { throw Error("primitive is not convex"); },
      },
      p);
}

// Closest distance between segments [p1,q1] and [p2,q2].
double segment_segment_distance(const Point& p1, const Point& q1, const Point& p2,
                                const Point& q2) {
  const Point d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  const double c = d1.dot(r), b = d1.dot(d2);
  const double denom = a * e - b * b;
  double s = denom > 1e-300 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
  double t = (b * s + f) / e;
  if (t < 0.0) {
    t = 0.0;
    s = std::clamp(-c / a, 0.0, 1.0);
  } else if (t > 1.0) {
    t = 1.0;
    s = std::clamp((b - c) / a, 0.0, 1.0);
  }
  return ((p1 + s * d1) - (p2 + t * d2)).norm();
}

// Distance between two convex primitives by alternating projections.
double alternating_projection_distance(const Primitive& a, const Primitive& b) {
  Point x = project_convex(a, Point::Zero());
  Point y = project_convex(b, x);
  double prev = kInf;
  for (int it = 0; it < 20000; ++it) {
    x = project_convex(a, y);
    y = project_convex(b, x);
    const double d = (x - y).norm();
    if (prev - d < 1e-15) return d;
    prev = d;
  }
  return (x - y).norm();
}

double convex_convex_separation(const Primitive& a, const Primitive& b) {
  if (const auto* h = std::get_if<HyperplanePrim>(&a)) {
    if (const auto* g = std::get_if<HyperplanePrim>(&b)) {
      const double c = h->normal.dot(g->normal);
      if (std::abs(std::abs(c) - 1.0) > 1e-12) return 0.0;
      return std::abs(h->offset - c * g->offset);
    }
    // Signed distances of the extreme points of b along the normal.
    const auto sd = [&](const Point& p) { return h->normal.dot(p) - h->offset; };
    return std::visit(
        overloaded{
            [&](const BallPrim& q) { return std::max(0.0, std::abs(sd(q.center)) - q.radius); },
            [&](const SegmentPrim& q) {
              const double u = sd(q.a), v = sd(q.b);
              if (u * v <= 0.0) return 0.0;
              return std::min(std::abs(u), std::abs(v));
            },
            [&](const BoxPrim& q) {
              double lo = kInf, hi = -kInf;
              for (int m = 0; m < 8; ++m) {
                Point c;
                for (int k = 0; k < 3; ++k) c[k] = (m >> k & 1) ? q.max[k] : q.min[k];
                lo = std::min(lo, sd(c));
                hi = std::max(hi, sd(c));
              }
              if (lo <= 0.0 && hi >= 0.0) return 0.0;
              return std::min(std::abs(lo), std::abs(hi));
            },
            [&](const PointPrim& q) { return std::abs(sd(q.coords)); },
            [&](const auto&) -> double { throw Error("unexpected primitive"); },
        },
        b);
  }
  if (std::holds_alternative<HyperplanePrim>(b)) return convex_convex_separation(b, a);
  if (const auto* ball = std::get_if<BallPrim>(&a)) {
    return std::max(0.0, distance(b, ball->center) - ball->radius);
  }
  if (std::holds_alternative<BallPrim>(b)) return convex_convex_separation(b, a);
  if (const auto* s = std::get_if<SegmentPrim>(&a)) {
    if (const auto* t = std::get_if<SegmentPrim>(&b)) {
      return segment_segment_distance(s->a, s->b, t->a, t->b);
    }
  }
  if (const auto* p = std::get_if<BoxPrim>(&a)) {
    if (const auto* q = std::get_if<BoxPrim>(&b)) {
      const Point gap =
          (p->min - q->max).cwiseMax(q->min - p->max).cwiseMax(Point::Zero());
      return gap.norm();
    }
  }
  return alternating_projection_distance(a, b);
}

void require_dimension(const Point& p, int dimension, const std::string& what) {
  if (dimension == 2 && p.z() != 0.0) {
    throw SceneError(what + " has a nonzero third coordinate in a 2D scene");
  }
}

void validate_primitive(const Primitive& prim, int dimension, const std::string& where) {
  std::visit(
      overloaded{
          [&](const PointPrim& q) { require_dimension(q.coords, dimension, where); },
          [&](const PointSetPrim& q) {
            if (q.points.empty()) throw SceneError(where + ": point_set is empty");
            for (const auto& p : q.points) require_dimension(p, dimension, where);
          },
          [&](const HyperplanePrim& q) {
            require_dimension(q.normal, dimension, where);
            if (std::abs(q.normal.norm() - 1.0) > kUnitNormalTolerance) {
              throw SceneError(where + ": hyperplane normal must have unit norm");
            }
          },
          [&](const SpherePrim& q) {
            require_dimension(q.center, dimension, where);
            if (!(q.radius > 0.0)) throw SceneError(where + ": sphere radius must be > 0");
          },
          [&](const BallPrim& q) {
            require_dimension(q.center, dimension, where);
            if (!(q.radius > 0.0)) throw SceneError(where + ": ball radius must be > 0");
          },
          [&](const SegmentPrim& q) {
            require_dimension(q.a, dimension, where);
            require_dimension(q.b, dimension, where);
            if (q.a == q.b) throw SceneError(where + ": segment endpoints coincide");
          },
          [&](const BoxPrim& q) {
            require_dimension(q.min, dimension, where);
            require_dimension(q.max, dimension, where);
            for (int k = 0; k < dimension; ++k) {
              if (!(q.min[k] < q.max[k])) throw SceneError(where + ": box min must be < max");
            }
          },
      },
      prim);
}

}  // namespace

std::string_view to_string(Metric m) {
  return m == Metric::euclidean ? "euclidean" : "taxicab";
}

std::string_view primitive_type_name(const Primitive& p) {
  static constexpr std::string_view names[] = {"point",   "point_set", "hyperplane", "sphere",
                                               "ball",    "segment",   "box"};
  return names[p.index()];
}

Scene::Scene(int dimension, std::vector<Site> sites, Metric metric)
    : dimension_(dimension), sites_(std::move(sites)), metric_(metric) {
  if (dimension_ != 2 && dimension_ != 3) throw SceneError("dimension must be 2 or 3");
  if (sites_.size() < 2) throw SceneError("a scene needs at least two sites");
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    const auto& s = sites_[i];
    if (s.primitives.empty()) throw SceneError("site '" + s.id + "' has no primitives");
    for (std::size_t p = 0; p < s.primitives.size(); ++p) {
      validate_primitive(s.primitives[p], dimension_,
                         "site '" + s.id + "' primitive " + std::to_string(p));
    }
  }
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    for (std::size_t j = i + 1; j < sites_.size(); ++j) {
      const double d = site_separation(sites_[i], sites_[j], dimension_);
      if (d < kDisjointnessTolerance) {
        std::ostringstream msg;
        msg << "sites '" << sites_[i].id << "' and '" << sites_[j].id
            << "' are not disjoint (distance " << d << ")";
        throw SceneError(msg.str());
      }
    }
  }
}

Scene Scene::with_metric(Metric m) const {
  Scene copy = *this;
  copy.metric_ = m;
  return copy;
}

double distance(const Primitive& p, const Point& x, Metric metric) {
  if (metric == Metric::taxicab) {
    return std::visit(
        overloaded{
            [&](const PointPrim& q) { return (x - q.coords).lpNorm<1>(); },
            [&](const PointSetPrim& q) {
              double best = kInf;
              for (const auto& pt : q.points) best = std::min(best, (x - pt).lpNorm<1>());
              return best;
            },
            [&](const BoxPrim& q) { return (x - project_box(q, x)).lpNorm<1>(); },
            [&](const auto&) -> double {
              throw Error("taxicab distance is not implemented for " +
                          std::string(primitive_type_name(p)) + " primitives");
            },
        },
        p);
  }
  return std::visit(
      overloaded{
          [&](const PointPrim& q) { return (x - q.coords).norm(); },
          [&](const PointSetPrim& q) {
            double best = kInf;
            for (const auto& pt : q.points) best = std::min(best, (x - pt).norm());
            return best;
          },
          [&](const HyperplanePrim& q) { return std::abs(q.normal.dot(x) - q.offset); },
          [&](const SpherePrim& q) { return std::abs((x - q.center).norm() - q.radius); },
          [&](const BallPrim& q) { return std::max(0.0, (x - q.center).norm() - q.radius); },
          [&](const SegmentPrim& q) { return (x - project_segment(q.a, q.b, x)).norm(); },
          [&](const BoxPrim& q) { return (x - project_box(q, x)).norm(); },
      },
      p);
}

Point nearest_point(const Primitive& p, const Point& x) {
  return std::visit(
      overloaded{
          [&](const PointSetPrim& q) -> Point {
            double best = kInf;
            for (const auto& pt : q.points) best = std::min(best, (x - pt).norm());
            const Point* pick = nullptr;
            for (const auto& pt : q.points) {
              if ((x - pt).norm() <= best + kFootTieTolerance && (!pick || lex_less(pt, *pick))) {
                pick = &pt;
              }
            }
            return *pick;
          },
          [&](const SpherePrim& q) -> Point {
            const Point d = x - q.center;
            const double n = d.norm();
            if (n == 0.0) return q.center - q.radius * Point::UnitX();
            return q.center + (q.radius / n) * d;
          },
          [&](const auto&) -> Point { return project_convex(p, x); },
      },
      p);
}

double distance(const Site& site, const Point& x, Metric metric) {
  double best = kInf;
  for (const auto& p : site.primitives) best = std::min(best, distance(p, x, metric));
  return best;
}

Point nearest_point(const Site& site, const Point& x) {
  double best = kInf;
  for (const auto& p : site.primitives) best = std::min(best, distance(p, x));
  for (const auto& p : site.primitives) {
    if (distance(p, x) <= best + kFootTieTolerance) return nearest_point(p, x);
  }
  return nearest_point(site.primitives.front(), x);
}

double primitive_separation(const Primitive& a, const Primitive& b, int /*dimension*/) {
  if (const auto* q = std::get_if<PointPrim>(&a)) return distance(b, q->coords);
  if (std::holds_alternative<PointPrim>(b)) return primitive_separation(b, a, 0);
  if (const auto* q = std::get_if<PointSetPrim>(&a)) {
    double best = kInf;
    for (const auto& pt : q->points) best = std::min(best, distance(b, pt));
    return best;
  }
  if (std::holds_alternative<PointSetPrim>(b)) return primitive_separation(b, a, 0);
  if (const auto* s = std::get_if<SpherePrim>(&a)) {
    if (const auto* t = std::get_if<SpherePrim>(&b)) {
      const double d = (s->center - t->center).norm();
      if (d >= s->radius + t->radius) return d - s->radius - t->radius;
      const double inner = std::abs(s->radius - t->radius) - d;
      return std::max(0.0, inner);
    }
    const double near = distance(b, s->center);
    const double far = far_distance(b, s->center);
    if (near > s->radius) return near - s->radius;
    if (far < s->radius) return s->radius - far;
    return 0.0;
  }
  if (std::holds_alternative<SpherePrim>(b)) return primitive_separation(b, a, 0);
  return convex_convex_separation(a, b);
}

double site_separation(const Site& a, const Site& b, int dimension) {
  double best = kInf;
  for (const auto& p : a.primitives) {
    for (const auto& q : b.primitives) best = std::min(best, primitive_separation(p, q, dimension));
  }
  return best;
}

// ---------------------------------------------------------------------------
// JSON scene format.

namespace {

using nlohmann::json;

Point read_coords(const json& j, int dimension, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected a coordinate array");
  if (static_cast<int>(j.size()) != dimension) {
    throw SceneError(where + ": expected " + std::to_string(dimension) + " coordinates, got " +
                     std::to_string(j.size()));
  }
  Point p = Point::Zero();
  for (int k = 0; k < dimension; ++k) {
    if (!j[k].is_number()) throw ParseError(where + ": coordinates must be numbers");
    p[k] = j[k].get<double>();
  }
  return p;
}

double read_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw ParseError(where + ": missing numeric field '" + key + "'");
  }
  return obj[key].get<double>();
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  return obj[key];
}

Primitive read_primitive(const json& j, int dim, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": primitive must be an object");
  const std::string type = field(j, "type", where).get<std::string>();
  if (type == "point") return PointPrim{read_coords(field(j, "coords", where), dim, where)};
  if (type == "point_set") {
    const json& pts = field(j, "points", where);
    if (!pts.is_array()) throw ParseError(where + ": 'points' must be an array");
    PointSetPrim ps;
    for (const auto& p : pts) ps.points.push_back(read_coords(p, dim, where));
    return ps;
  }
  if (type == "hyperplane") {
    return HyperplanePrim{read_coords(field(j, "normal", where), dim, where),
                          read_number(j, "offset", where)};
  }
  if (type == "sphere") {
    return SpherePrim{read_coords(field(j, "center", where), dim, where),
                      read_number(j, "radius", where)};
  }
  if (type == "ball") {
    return BallPrim{read_coords(field(j, "center", where), dim, where),
                    read_number(j, "radius", where)};
  }
  if (type == "segment") {
    return SegmentPrim{read_coords(field(j, "a", where), dim, where),
                       read_coords(field(j, "b", where), dim, where)};
  }
  if (type == "box") {
    return BoxPrim{read_coords(field(j, "min", where), dim, where),
                   read_coords(field(j, "max", where), dim, where)};
  }
  throw ParseError(where + ": unknown primitive type '" + type + "'");
}

json coords_json(const Point& p, int dim) {
  json a = json::array();
  for (int k = 0; k < dim; ++k) a.push_back(p[k]);
  return a;
}

}  // namespace

Scene parse_scene(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("scene syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    if (!doc.is_object()) throw ParseError("scene must be a JSON object");
    const json& dim_j = field(doc, "dimension", "scene");
    if (!dim_j.is_number_integer()) throw ParseError("scene: 'dimension' must be an integer");
    const int dim = dim_j.get<int>();
    if (dim != 2 && dim != 3) throw SceneError("scene: dimension must be 2 or 3");
    Metric metric = Metric::euclidean;
    if (doc.contains("metric")) {
      const std::string m = doc["metric"].get<std::string>();
      if (m == "euclidean") {
        metric = Metric::euclidean;
      } else if (m == "taxicab") {
        metric = Metric::taxicab;
      } else {
        throw ParseError("scene: unknown metric '" + m + "'");
      }
    }
    const json& sites_j = field(doc, "sites", "scene");
    if (!sites_j.is_array()) throw ParseError("scene: 'sites' must be an array");
    std::vector<Site> sites;
    for (std::size_t i = 0; i < sites_j.size(); ++i) {
      const json& sj = sites_j[i];
      const std::string where = "site " + std::to_string(i);
      Site site;
      site.id = sj.contains("id") ? sj["id"].get<std::string>() : "site" + std::to_string(i);
      const json& prims = field(sj, "primitives", where);
      if (!prims.is_array()) throw ParseError(where + ": 'primitives' must be an array");
      for (std::size_t p = 0; p < prims.size(); ++p) {
        site.primitives.push_back(
            read_primitive(prims[p], dim, where + " primitive " + std::to_string(p)));
      }
      sites.push_back(std::move(site));
    }
    return Scene(dim, std::move(sites), metric);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene: malformed field: ") + e.what());
  }
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read scene file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

std::string scene_to_json(const Scene& scene) {
  const int dim = scene.dimension();
  json doc;
  doc["dimension"] = dim;
  doc["metric"] = std::string(to_string(scene.metric()));
  json sites = json::array();
  for (const auto& s : scene.sites()) {
    json prims = json::array();
    for (const auto& p : s.primitives) {
      json pj;
      pj["type"] = std::string(primitive_type_name(p));
      std::visit(overloaded{
                     [&](const PointPrim& q) { pj["coords"] = coords_json(q.coords, dim); },
                     [&](const PointSetPrim& q) {
                       json pts = json::array();
                       for (const auto& pt : q.points) pts.push_back(coords_json(pt, dim));
                       pj["points"] = pts;
                     },
                     [&](const HyperplanePrim& q) {
                       pj["normal"] = coords_json(q.normal, dim);
                       pj["offset"] = q.offset;
                     },
                     [&](const SpherePrim& q) {
                       pj["center"] = coords_json(q.center, dim);
                       pj["radius"] = q.radius;
                     },
                     [&](const BallPrim& q) {
                       pj["center"] = coords_json(q.center, dim);
                       pj["radius"] = q.radius;
                     },
                     [&](const SegmentPrim& q) {
                       pj["a"] = coords_json(q.a, dim);
                       pj["b"] = coords_json(q.b, dim);
                     },
                     [&](const BoxPrim& q) {
                       pj["min"] = coords_json(q.min, dim);
                       pj["max"] = coords_json(q.max, dim);
                     },
                 },
                 p);
      prims.push_back(pj);
    }
    sites.push_back({{"id", s.id}, {"primitives", prims}});
  }
  doc["sites"] = sites;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Ball clipping.

namespace {

// Dykstra's alternating projection onto shape ∩ ball.
Point project_clipped_convex(const ClippedConvex& c, const Point& x) {
  Point y = x, p = Point::Zero(), q = Point::Zero();
  Point xs = x;
  for (int it = 0; it < 100000; ++it) {
    const Point xs_new = project_convex(c.shape, y + p);
    p = y + p - xs_new;
    const Point y_new = project_ball(c.ball_center, c.ball_radius, xs_new + q);
    q = xs_new + q - y_new;
    const double change = (y_new - y).norm() + (xs_new - xs).norm();
    xs = xs_new;
    y = y_new;
    if (change < 1e-13 && (xs - y).norm() < 1e-12) break;
  }
  return y;
}

Point any_perpendicular(const Point& a, int dimension) {
  if (dimension == 2) return Point(-a.y(), a.x(), 0.0).normalized();
  const Point trial = std::abs(a.x()) < 0.9 ? Point::UnitX() : Point::UnitY();
  return (trial - trial.dot(a) * a).normalized();
}

std::optional<ClippedPrimitive> clip_primitive(const Primitive& prim, const Point& x0, double r,
                                               int dim) {
  const double r2 = r * r;
  return std::visit(
      overloaded{
          [&](const PointPrim& q) -> std::optional<ClippedPrimitive> {
            if ((q.coords - x0).squaredNorm() <= r2) return ClippedPrimitive{q};
            return std::nullopt;
          },
          [&](const PointSetPrim& q) -> std::optional<ClippedPrimitive> {
            PointSetPrim kept;
            for (const auto& p : q.points) {
              if ((p - x0).squaredNorm() <= r2) kept.points.push_back(p);
            }
            if (kept.points.empty()) return std::nullopt;
            return ClippedPrimitive{kept};
          },
          [&](const HyperplanePrim& q) -> std::optional<ClippedPrimitive> {
            const double h = q.normal.dot(x0) - q.offset;
            if (std::abs(h) > r) return std::nullopt;
            const Point c = x0 - h * q.normal;
            const double rho = std::sqrt(std::max(0.0, r2 - h * h));
            if (dim == 2) {
              const Point t(-q.normal.y(), q.normal.x(), 0.0);
              if (rho == 0.0) return ClippedPrimitive{PointPrim{c}};
              return ClippedPrimitive{SegmentPrim{c - rho * t, c + rho * t}};
            }
            return ClippedPrimitive{ClippedDisk{c, q.normal, rho, dim}};
          },
          [&](const SpherePrim& q) -> std::optional<ClippedPrimitive> {
            const Point d = x0 - q.center;
            const double D = d.norm();
            const double R = q.radius;
            if (D == 0.0) {
              if (R <= r) return ClippedPrimitive{ClippedCap{q.center, R, any_perpendicular(
                                                      Point::UnitX(), dim), -1.0, dim}};
              return std::nullopt;
            }
            const double cos_limit = (R * R + D * D - r2) / (2.0 * R * D);
            if (cos_limit > 1.0) return std::nullopt;
            return ClippedPrimitive{ClippedCap{q.center, R, d / D, std::max(-1.0, cos_limit), dim}};
          },
          [&](const BallPrim& q) -> std::optional<ClippedPrimitive> {
            if ((q.center - x0).norm() > q.radius + r) return std::nullopt;
            return ClippedPrimitive{ClippedConvex{q, x0, r}};
          },
          [&](const SegmentPrim& q) -> std::optional<ClippedPrimitive> {
            // |a + t(b-a) - x0|^2 = r^2
            const Point ab = q.b - q.a, ax = q.a - x0;
            const double A = ab.squaredNorm(), B = 2.0 * ab.dot(ax), C = ax.squaredNorm() - r2;
            const double disc = B * B - 4.0 * A * C;
            if (disc < 0.0) return std::nullopt;
            const double s = std::sqrt(disc);
            const double t0 = std::max(0.0, (-B - s) / (2.0 * A));
            const double t1 = std::min(1.0, (-B + s) / (2.0 * A));
            if (t0 > t1) return std::nullopt;
            const Point a = t0 == 0.0 ? q.a : Point(q.a + t0 * ab);
            const Point b = t1 == 1.0 ? q.b : Point(q.a + t1 * ab);
            if (a == b) return ClippedPrimitive{PointPrim{a}};
            return ClippedPrimitive{SegmentPrim{a, b}};
          },
          [&](const BoxPrim& q) -> std::optional<ClippedPrimitive> {
            if ((project_box(q, x0) - x0).norm() > r) return std::nullopt;
            return ClippedPrimitive{ClippedConvex{q, x0, r}};
          },
      },
      prim);
}

}  // namespace

double clipped_distance(const ClippedPrimitive& p, const Point& x) {
  return std::visit(
      overloaded{
          [&](const PointPrim& q) { return (x - q.coords).norm(); },
          [&](const PointSetPrim& q) { return distance(Primitive{q}, x); },
          [&](const SegmentPrim& q) { return (x - project_segment(q.a, q.b, x)).norm(); },
          [&](const ClippedDisk& q) {
            const double h = q.normal.dot(x - q.center);
            const Point foot = x - h * q.normal;
            const Point v = foot - q.center;
            const double n = v.norm();
            if (n <= q.radius) return std::abs(h);
            return (x - (q.center + (q.radius / n) * v)).norm();
          },
          [&](const ClippedCap& q) {
            const Point d = x - q.center;
            const double n = d.norm();
            if (n == 0.0) return q.radius;
            const Point u = d / n;
            const double c = u.dot(q.axis);
            if (c >= q.cos_limit) return std::abs(n - q.radius);
            Point w = u - c * q.axis;
            const double wn = w.norm();
            w = wn > 0.0 ? Point(w / wn) : any_perpendicular(q.axis, q.dimension);
            const double s = std::sqrt(std::max(0.0, 1.0 - q.cos_limit * q.cos_limit));
            const Point foot = q.center + q.radius * (q.cos_limit * q.axis + s * w);
            return (x - foot).norm();
          },
          [&](const ClippedConvex& q) { return (x - project_clipped_convex(q, x)).norm(); },
      },
      p);
}

ClippedScene::ClippedScene(const Scene& base, Point center, double radius)
    : base_(base), center_(std::move(center)), radius_(radius) {
  if (!(radius_ > 0.0)) throw Error("clip radius must be > 0");
  for (const auto& s : base_.sites()) {
    ClippedSite cs{s.id, {}};
    for (const auto& p : s.primitives) {
      if (auto c = clip_primitive(p, center_, radius_, base_.dimension())) {
        cs.pieces.push_back(std::move(*c));
      }
    }
    sites_.push_back(std::move(cs));
  }
}

double ClippedScene::distance(std::size_t i, const Point& x) const {
  double best = kInf;
  for (const auto& p : sites_[i].pieces) best = std::min(best, clipped_distance(p, x));
  return best;
}

ClippedScene clip_scene(const Scene& scene, const Point& x0, double radius) {
  return ClippedScene(scene, x0, radius);
}

}  // namespace conflict
