#include "conflict/spherical.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <unordered_map>

namespace conflict {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSnap = 1e-12;

double angle_between(const Point& u, const Point& v) {
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

void push_unique(std::vector<Point>& list, const Point& p) {
  for (const auto& q : list) {
    if ((q - p).norm() <= 1e-12) return;
  }
  list.push_back(p);
}

}  // namespace

DistanceProfile min_distance_profile(const Scene& scene, const Point& x0, double tie_tol) {
  if (scene.metric() != Metric::euclidean) {
    throw Error("support analysis requires the Euclidean metric");
  }
  DistanceProfile out;
  const auto d = site_distances(scene, x0);
  out.r0 = *std::min_element(d.begin(), d.end());
  if (out.r0 <= kSnap) throw Error("x0 lies inside a site (r0 = 0)");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] <= out.r0 + tie_tol) out.achieving.push_back(static_cast<int>(i));
  }
  return out;
}

double SiteSupport::geodesic_distance_to(const Point& u) const {
  if (whole_sphere) return 0.0;
  double best = kInf;
  for (const auto& p : points) best = std::min(best, angle_between(u, p));
  return best;
}

std::vector<int> SupportSet::nonempty() const {
  std::vector<int> out;
  for (const auto& s : sites) {
    if (!s.empty()) out.push_back(s.site);
  }
  return out;
}

std::vector<int> SupportSet::excluded() const {
  std::vector<int> out;
  for (const auto& s : sites) {
    if (s.empty()) out.push_back(s.site);
  }
  return out;
}

SupportSet support_sets(const Scene& scene, const Point& x0) {
  const DistanceProfile profile = min_distance_profile(scene, x0);
  SupportSet out;
  out.x0 = x0;
  out.r0 = profile.r0;
  out.dimension = scene.dimension();
  const double tol = kTieTolerance;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    SiteSupport sup;
    sup.site = static_cast<int>(i);
    sup.id = scene.site(i).id;
    const bool achieving =
        std::find(profile.achieving.begin(), profile.achieving.end(), static_cast<int>(i)) !=
        profile.achieving.end();
    if (achieving) {
      for (const auto& prim : scene.site(i).primitives) {
        if (distance(prim, x0) > out.r0 + tol) continue;
        if (const auto* ps = std::get_if<PointSetPrim>(&prim)) {
          for (const auto& p : ps->points) {
            if ((p - x0).norm() <= out.r0 + tol) push_unique(sup.points, (p - x0).normalized());
          }
        } else if (const auto* sp = std::get_if<SpherePrim>(&prim);
                   sp && (sp->center - x0).norm() <= kSnap) {
          sup.whole_sphere = true;
        } else {
          push_unique(sup.points, (nearest_point(prim, x0) - x0).normalized());
        }
      }
    }
    for (const auto& u : sup.points) sup.samples.push_back(x0 + out.r0 * u);
    if (sup.whole_sphere) {
      if (out.dimension == 2) {
        for (int m = 0; m < kCircleSamples; ++m) {
          const double t = 2.0 * std::numbers::pi * m / kCircleSamples;
          sup.samples.push_back(x0 + out.r0 * Point(std::cos(t), std::sin(t), 0.0));
        }
      } else {
        for (const auto& u : make_icosphere(4).vertices) sup.samples.push_back(x0 + out.r0 * u);
      }
    }
    out.sites.push_back(std::move(sup));
  }
  return out;
}

double geodesic_distance(const Point& u, const Point& v) {
  if (std::abs(u.norm() - 1.0) > 1e-10 || std::abs(v.norm() - 1.0) > 1e-10) {
    throw Error("geodesic_distance expects unit vectors");
  }
  return angle_between(u, v);
}

int default_spherical_resolution(int dimension) { return dimension == 2 ? 4096 : 6; }

Icosphere make_icosphere(int level) {
  if (level < 0 || level > 9) throw Error("icosphere level must be in [0, 9]");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Icosphere s;
  const double raw[12][3] = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                             {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                             {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (const auto& r : raw) s.vertices.push_back(Point(r[0], r[1], r[2]).normalized());
  s.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    const auto midpoint = [&](int a, int b) {
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const int id = static_cast<int>(s.vertices.size());
      s.vertices.push_back((s.vertices[a] + s.vertices[b]).normalized());
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(s.faces.size() * 4);
    for (const auto& f : s.faces) {
      const int ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    s.faces = std::move(next);
  }
  return s;
}

TerritoryLabel spherical_label(const SupportSet& support, const Point& u, double tie_tol) {
  TerritoryLabel out;
  std::vector<double> g(support.sites.size(), kInf);
  for (std::size_t i = 0; i < support.sites.size(); ++i) {
    if (!support.sites[i].empty()) g[i] = support.sites[i].geodesic_distance_to(u);
  }
  const double best = *std::min_element(g.begin(), g.end());
  double second = kInf;
  bool seen = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] <= best + tie_tol) out.argmin.push_back(static_cast<int>(i));
    if (g[i] == best && !seen) {
      seen = true;
    } else {
      second = std::min(second, g[i]);
    }
  }
  out.min_distance = best;
  out.margin = out.argmin.size() >= 2 ? 0.0 : second - best;
  return out;
}

namespace {

struct SphereVertex {
  std::uint64_t key = 0;
  Point u;
  double residual = 0.0;
  SitePair pair;
};

class SphereLabeler {
 public:
  explicit SphereLabeler(const SupportSet& s) : s_(s) {
    for (const auto& site : s.sites) {
      if (!site.empty()) active_.push_back(site.site);
    }
  }

  // Geodesic distances to all supports (infinite for empty ones).
  std::vector<double> distances(const Point& u) const {
    std::vector<double> g(s_.sites.size(), kInf);
    for (int i : active_) g[i] = s_.sites[i].geodesic_distance_to(u);
    return g;
  }
  static int primary(const std::vector<double>& g) {
    int best = 0;
    for (std::size_t i = 1; i < g.size(); ++i) {
      if (g[i] < g[best]) best = static_cast<int>(i);
    }
    return best;
  }
  double diff(const Point& u, SitePair p) const {
    return s_.sites[p.i].geodesic_distance_to(u) - s_.sites[p.j].geodesic_distance_to(u);
  }
  bool minimal(const Point& u, SitePair p) const {
    const auto lab = spherical_label(s_, u, kMinimalityTolerance);
    return lab.contains(p.i) && lab.contains(p.j);
  }

  // Root of the geodesic distance difference along the curve gamma(t), t in [0, 1].
  template <class Curve>
  std::optional<Point> root(const Curve& gamma, double fa, SitePair p) const {
    double t0 = 0.0, t1 = 1.0;
    const bool side = fa <= 0.0;
    for (int it = 0; it < 100; ++it) {
      const double tm = 0.5 * (t0 + t1);
      const double fm = diff(gamma(tm), p);
      if (fm == 0.0) {
        t0 = t1 = tm;
        break;
      }
      if ((fm <= 0.0) == side) {
        t0 = tm;
      } else {
        t1 = tm;
      }
      if (t1 - t0 < 1e-17) break;
    }
    const Point u = gamma(0.5 * (t0 + t1)).normalized();
    if (std::abs(diff(u, p)) > kResidualTolerance || !minimal(u, p)) return std::nullopt;
    return u;
  }

  const SupportSet& s_;
  std::vector<int> active_;
};

SphericalComplex conflict_on_circle(const SphereLabeler& lab, int n) {
  SphericalComplex out;
  out.dimension = 2;
  const auto at = [&](double t) { return Point(std::cos(t), std::sin(t), 0.0); };
  std::vector<std::vector<double>> g(n);
  std::vector<int> primary(n);
  for (int m = 0; m < n; ++m) {
    g[m] = lab.distances(at(2.0 * std::numbers::pi * m / n));
    primary[m] = SphereLabeler::primary(g[m]);
  }
  std::map<std::uint64_t, SphereVertex> found;
  for (int m = 0; m < n; ++m) {
    const int m1 = (m + 1) % n;
    if (primary[m] == primary[m1]) continue;
    const SitePair p = SitePair::of(primary[m], primary[m1]);
    const double fa = g[m][p.i] - g[m][p.j];
    const double fb = g[m1][p.i] - g[m1][p.j];
    const double ta = 2.0 * std::numbers::pi * m / n;
    const double tb = 2.0 * std::numbers::pi * (m + 1) / n;
    SphereVertex v;
    v.pair = p;
    if (std::abs(fa) <= kSnap || std::abs(fb) <= kSnap) {
      const bool use_a = std::abs(fa) <= std::abs(fb);
      v.key = static_cast<std::uint64_t>(use_a ? m : m1);
      v.u = at(use_a ? ta : tb);
      if (!lab.minimal(v.u, p)) continue;
    } else {
      auto u = lab.root([&](double t) { return at(ta + t * (tb - ta)); }, fa, p);
      if (!u) continue;
      v.key = static_cast<std::uint64_t>(n + m);
      v.u = *u;
    }
    v.residual = std::abs(lab.diff(v.u, p));
    found.emplace(v.key, v);
  }
  for (const auto& [key, v] : found) {
    out.vertices.push_back(v.u);
    out.residuals.push_back(v.residual);
    out.vertex_pairs.push_back(v.pair);
  }
  return out;
}

Point slerp(const Point& a, const Point& b, double t) {
  const double w = angle_between(a, b);
  if (w < 1e-15) return a;
  return ((std::sin((1.0 - t) * w) * a + std::sin(t * w) * b) / std::sin(w)).normalized();
}

bool inside_spherical_triangle(const Point& a, const Point& b, const Point& c, const Point& u,
                               double margin) {
  const double s = a.cross(b).dot(c) > 0 ? 1.0 : -1.0;
  return s * a.cross(b).dot(u) >= -margin && s * b.cross(c).dot(u) >= -margin &&
         s * c.cross(a).dot(u) >= -margin;
}

std::optional<Point> spherical_junction(const SphereLabeler& lab, const std::array<int, 3>& t,
                                        const Point& a, const Point& b, const Point& c) {
  const Point center = (a + b + c).normalized();
  Point e1 = (b - a);
  e1 = (e1 - e1.dot(center) * center).normalized();
  const Point e2 = center.cross(e1);
  const auto U = [&](const Eigen::Vector2d& x) {
    return Point(center + x[0] * e1 + x[1] * e2).normalized();
  };
  const auto F = [&](const Eigen::Vector2d& x) {
    const Point u = U(x);
    const double g0 = lab.s_.sites[t[0]].geodesic_distance_to(u);
    return Eigen::Vector2d(g0 - lab.s_.sites[t[1]].geodesic_distance_to(u),
                           g0 - lab.s_.sites[t[2]].geodesic_distance_to(u));
  };
  const double h = (b - a).norm();
  const double step = 1e-7 * h;
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  for (int it = 0; it < 60; ++it) {
    const Eigen::Vector2d Fx = F(x);
    if (Fx.lpNorm<Eigen::Infinity>() <= 1e-13) break;
    Eigen::Matrix2d J;
    for (int col = 0; col < 2; ++col) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e[col] = step;
      J.col(col) = (F(x + e) - F(x - e)) / (2.0 * step);
    }
    if (std::abs(J.determinant()) < 1e-14) return std::nullopt;
    Eigen::Vector2d dx = J.partialPivLu().solve(Fx);
    if (dx.norm() > 2.0 * h) dx *= 2.0 * h / dx.norm();
    x -= dx;
  }
  const Point u = U(x);
  if (!inside_spherical_triangle(a, b, c, u, 1e-9 * h)) return std::nullopt;
  const Eigen::Vector2d r = F(x);
  if (r.lpNorm<Eigen::Infinity>() > kResidualTolerance) return std::nullopt;
  const auto l = spherical_label(lab.s_, u, kMinimalityTolerance);
  if (!l.contains(t[0]) || !l.contains(t[1]) || !l.contains(t[2])) return std::nullopt;
  return u;
}

SphericalComplex conflict_on_sphere(const SphereLabeler& lab, int level) {
  SphericalComplex out;
  out.dimension = 3;
  const Icosphere ico = make_icosphere(level);
  const std::size_t nv = ico.vertices.size();
  std::vector<std::vector<double>> g(nv);
  std::vector<int> primary(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    g[v] = lab.distances(ico.vertices[v]);
    primary[v] = SphereLabeler::primary(g[v]);
  }
  std::unordered_map<std::uint64_t, int> ids;
  std::set<std::pair<int, int>> seen;
  const auto add_vertex = [&](const SphereVertex& v) {
    auto [it, inserted] = ids.try_emplace(v.key, static_cast<int>(out.vertices.size()));
    if (inserted) {
      out.vertices.push_back(v.u);
      out.residuals.push_back(v.residual);
      out.vertex_pairs.push_back(v.pair);
    }
    return it->second;
  };
  const auto add_arc = [&](const SphereVertex& a, const SphereVertex& b, SitePair p) {
    if (a.key == b.key) return;
    const int ia = add_vertex(a), ib = add_vertex(b);
    if (!seen.insert({std::min(ia, ib), std::max(ia, ib)}).second) return;
    out.arcs.push_back({ia, ib});
    out.arc_pairs.push_back(p);
  };
  const auto crossing = [&](int a, int b, SitePair p) -> std::optional<SphereVertex> {
    if (b < a) std::swap(a, b);
    const double fa = g[a][p.i] - g[a][p.j];
    const double fb = g[b][p.i] - g[b][p.j];
    SphereVertex v;
    v.pair = p;
    if (std::abs(fa) <= kSnap || std::abs(fb) <= kSnap) {
      const int c = std::abs(fa) <= std::abs(fb) ? a : b;
      v.key = static_cast<std::uint64_t>(c);
      v.u = ico.vertices[c];
      if (!lab.minimal(v.u, p)) return std::nullopt;
    } else {
      const Point& ua = ico.vertices[a];
      const Point& ub = ico.vertices[b];
      auto u = lab.root([&](double t) { return slerp(ua, ub, t); }, fa, p);
      if (!u) return std::nullopt;
      v.key = nv + static_cast<std::uint64_t>(a) * nv + static_cast<std::uint64_t>(b);
      v.u = *u;
    }
    v.residual = std::abs(lab.diff(v.u, p));
    return v;
  };
  for (std::size_t fi = 0; fi < ico.faces.size(); ++fi) {
    const auto& f = ico.faces[fi];
    std::set<int> labels{primary[f[0]], primary[f[1]], primary[f[2]]};
    if (labels.size() < 2) continue;
    std::array<std::optional<SphereVertex>, 3> cross;
    std::array<SitePair, 3> pairs;
    for (int e = 0; e < 3; ++e) {
      const int a = f[e], b = f[(e + 1) % 3];
      if (primary[a] == primary[b]) continue;
      pairs[e] = SitePair::of(primary[a], primary[b]);
      cross[e] = crossing(a, b, pairs[e]);
    }
    if (labels.size() == 2) {
      std::vector<int> es;
      for (int e = 0; e < 3; ++e) {
        if (pairs[e].i != pairs[e].j) es.push_back(e);
      }
      if (es.size() == 2 && cross[es[0]] && cross[es[1]]) {
        add_arc(*cross[es[0]], *cross[es[1]], pairs[es[0]]);
      }
      continue;
    }
    const std::vector<int> lv(labels.begin(), labels.end());
    auto j = spherical_junction(lab, {lv[0], lv[1], lv[2]}, ico.vertices[f[0]],
                                ico.vertices[f[1]], ico.vertices[f[2]]);
    if (!j) continue;
    SphereVertex jv;
    jv.key = (1ull << 62) | fi;
    jv.u = *j;
    jv.pair = SitePair::of(lv[0], lv[1]);
    for (int e = 0; e < 3; ++e) {
      if (cross[e]) jv.residual = std::max(jv.residual, std::abs(lab.diff(*j, pairs[e])));
    }
    for (int e = 0; e < 3; ++e) {
      if (cross[e]) add_arc(*cross[e], jv, pairs[e]);
    }
  }
  return out;
}

}  // namespace

SphericalComplex spherical_conflict(const SupportSet& support, const SphericalOptions& options) {
  if (support.nonempty().size() < 2) {
    throw Error("spherical conflict needs at least two nonempty supports");
  }
  const int res = options.resolution > 0 ? options.resolution
                                         : default_spherical_resolution(support.dimension);
  SphereLabeler lab(support);
  if (support.dimension == 2) {
    if (res < 8) throw Error("circle resolution must be at least 8 samples");
    return conflict_on_circle(lab, res);
  }
  return conflict_on_sphere(lab, res);
}

std::vector<Point> cone(const Point& x0, const SphericalComplex& spherical,
                        const std::vector<double>& radii) {
  for (double r : radii) {
    if (!(r > 0.0)) throw Error("cone radii must be positive");
  }
  std::vector<Point> out;
  out.reserve(spherical.vertices.size() * radii.size());
  for (const auto& u : spherical.vertices) {
    for (double r : radii) out.push_back(x0 + r * u);
  }
  return out;
}

Scene annular_shadow(const SupportSet& support, double eps) {
  if (!(eps > 0.0)) throw Error("annular shadow thickness must be positive");
  std::vector<Site> sites;
  for (const auto& s : support.sites) {
    if (s.empty()) continue;
    Site site{s.id, {}};
    for (const auto& y : s.samples) {
      const Point u = (y - support.x0).normalized();
      site.primitives.push_back(SegmentPrim{support.x0 + support.r0 * u,
                                            support.x0 + (support.r0 + eps) * u});
    }
    sites.push_back(std::move(site));
  }
  try {
    return Scene(support.dimension, std::move(sites));
  } catch (const SceneError& e) {
    throw SceneError(std::string("annular shadow: ") + e.what());
  }
}

}  // namespace conflict
