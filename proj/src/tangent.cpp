#include "conflict/tangent.hpp"

#include "conflict/parallel.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace conflict {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kVertexSnap = 1e-12;

bool has_window(const ConflictComplex& c) {
  for (int k = 0; k < c.dimension; ++k) {
    if (c.window.hi[k] > c.window.lo[k]) return true;
  }
  return false;
}

void check_slice_scale(const ConflictComplex& c, const Point& x0, double eps) {
  if (!(eps > 0.0)) throw Error("slice radius must be positive");
  if (c.spacing > 0.0 && eps < kMinSliceSpacings * c.spacing) {
    std::ostringstream msg;
    msg << "eps " << eps << " is below " << kMinSliceSpacings << " grid spacings ("
        << c.spacing << "); re-extract in a smaller window or at a higher resolution";
    throw Error(msg.str());
  }
  if (has_window(c)) {
    for (int k = 0; k < c.dimension; ++k) {
      if (x0[k] - eps < c.window.lo[k] - 1e-12 || x0[k] + eps > c.window.hi[k] + 1e-12) {
        std::ostringstream msg;
        msg << "sphere of radius " << eps << " around x0 leaves the extraction window";
        throw Error(msg.str());
      }
    }
  }
}

// Parameters t in [0, 1] where |a + t (b - a) - x0| = r, with the sign change convention
// "inside" = (|p - x0| <= r). Only crossings between an inside and an outside endpoint count.
std::vector<double> edge_roots(const Point& a, const Point& b, const Point& x0, double r) {
  const Point d = b - a;
  const Point w = a - x0;
  const double qa = d.squaredNorm();
  const double qb = 2.0 * w.dot(d);
  const double qc = w.squaredNorm() - r * r;
  std::vector<double> out;
  if (qa == 0.0) return out;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return out;
  const double s = std::sqrt(disc);
  // Numerically stable pair of roots.
  const double q = -0.5 * (qb + (qb >= 0.0 ? s : -s));
  double t1 = q / qa;
  double t2 = q != 0.0 ? qc / q : t1;
  if (t1 > t2) std::swap(t1, t2);
  const bool in_a = qc <= 0.0;
  const bool in_b = (b - x0).squaredNorm() - r * r <= 0.0;
  if (in_a == in_b) {
    // Both roots inside (0, 1): the edge dips into the ball and leaves again.
    if (!in_a && t1 > 0.0 && t2 < 1.0 && t1 < t2) {
      out.push_back(t1);
      out.push_back(t2);
    }
    return out;
  }
  // Exactly one crossing; pick the root in [0, 1] closest to it.
  double t = in_a ? t2 : t1;
  out.push_back(std::clamp(t, 0.0, 1.0));
  return out;
}

struct NodeKey {
  int a, b, k;  // vertex pair (a <= b) and root index along the edge
  auto operator<=>(const NodeKey&) const = default;
};

}  // namespace

RescaledSlice sphere_slice(const ConflictComplex& complex, const Point& x0, double eps) {
  check_slice_scale(complex, x0, eps);
  RescaledSlice out;
  out.x0 = x0;
  out.eps = eps;
  std::map<NodeKey, int> node_ids;

  // Node on the directed edge (a, b) at parameter t; endpoints snap to the vertex itself.
  const auto node = [&](int a, int b, double t, int k) {
    const Point p = (1.0 - t) * complex.vertices[a] + t * complex.vertices[b];
    NodeKey key{};
    double tt = t;
    int na = a, nb = b;
    if (t <= kVertexSnap) {
      key = {a, a, 0};
      nb = a;
      tt = 0.0;
    } else if (t >= 1.0 - kVertexSnap) {
      key = {b, b, 0};
      na = b;
      tt = 0.0;
    } else if (a <= b) {
      key = {a, b, k};
    } else {
      key = {b, a, k};
      std::swap(na, nb);
      tt = 1.0 - t;
    }
    auto [it, inserted] = node_ids.try_emplace(key, static_cast<int>(out.nodes.size()));
    if (inserted) {
      // Project onto the sphere to remove quadratic round-off.
      const Point q = x0 + eps * (p - x0).normalized();
      out.nodes.push_back({q, na, nb, tt});
      out.directions.push_back((q - x0) / eps);
    }
    return it->second;
  };

  if (complex.dimension == 2) {
    for (const auto& c : complex.cells) {
      const auto& a = complex.vertices[c.v[0]];
      const auto& b = complex.vertices[c.v[1]];
      const auto roots = edge_roots(a, b, x0, eps);
      for (std::size_t k = 0; k < roots.size(); ++k) {
        // Order root index by the canonical edge direction.
        const int kk = c.v[0] <= c.v[1] ? static_cast<int>(k)
                                         : static_cast<int>(roots.size() - 1 - k);
        node(c.v[0], c.v[1], roots[k], kk);
      }
    }
    return out;
  }

  for (const auto& c : complex.cells) {
    // Crossings in boundary order, tagged as exits (inside -> outside) or entries.
    struct Crossing {
      int node;
      bool exit;
    };
    std::vector<Crossing> crossings;
    for (int e = 0; e < 3; ++e) {
      const int ia = c.v[e], ib = c.v[(e + 1) % 3];
      const Point& a = complex.vertices[ia];
      const Point& b = complex.vertices[ib];
      const bool in_a = (a - x0).squaredNorm() <= eps * eps;
      const auto roots = edge_roots(a, b, x0, eps);
      bool inside = in_a;
      for (std::size_t k = 0; k < roots.size(); ++k) {
        const int kk = ia <= ib ? static_cast<int>(k) : static_cast<int>(roots.size() - 1 - k);
        crossings.push_back({node(ia, ib, roots[k], kk), inside});
        inside = !inside;
      }
    }
    if (crossings.size() < 2) continue;
    // Arcs of the circle inside the triangle join each exit to the next entry.
    const Point n = (complex.vertices[c.v[1]] - complex.vertices[c.v[0]])
                        .cross(complex.vertices[c.v[2]] - complex.vertices[c.v[0]]);
    const double nn = n.norm();
    const std::size_t m = crossings.size();
    for (std::size_t s = 0; s < m; ++s) {
      if (!crossings[s].exit) continue;
      const auto& next = crossings[(s + 1) % m];
      if (next.exit) continue;
      const int ia = crossings[s].node, ib = next.node;
      if (ia == ib) continue;
      out.links.push_back({std::min(ia, ib), std::max(ia, ib)});
      const Point& p = out.nodes[ia].point;
      const Point& q = out.nodes[ib].point;
      Point center = x0;
      if (nn > 0.0) {
        const Point un = n / nn;
        center = x0 + un.dot(complex.vertices[c.v[0]] - x0) * un;
      }
      const double span = std::acos(std::clamp((p - x0).normalized().dot((q - x0).normalized()), -1.0, 1.0));
      const int samples = std::max(kArcSamplesPerTriangle, static_cast<int>(std::ceil(span / kArcStep)) + 1);
      for (int k = 1; k < samples - 1; ++k) {
        const double t = static_cast<double>(k) / (samples - 1);
        Point y = (1.0 - t) * p + t * q;
        // Circle of the plane section: project from its center, then onto the sphere.
        const Point r = y - center;
        const double rho2 = eps * eps - (center - x0).squaredNorm();
        if (rho2 > 0.0 && r.norm() > 0.0) y = center + std::sqrt(rho2) * r.normalized();
        out.directions.push_back((y - x0).normalized());
      }
    }
  }
  std::sort(out.links.begin(), out.links.end());
  out.links.erase(std::unique(out.links.begin(), out.links.end()), out.links.end());
  return out;
}

double directed_hausdorff(const std::vector<Point>& from, const std::vector<Point>& to,
                          int workers) {
  if (from.empty() || to.empty()) throw Error("hausdorff distance of an empty point cloud");
  const int chunks = std::max(1, workers);
  std::vector<double> partial(chunks, 0.0);
  const std::size_t n = from.size();
  parallel_for(chunks, chunks, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      double worst = 0.0;
      for (std::size_t i = c * n / chunks; i < (c + 1) * n / chunks; ++i) {
        double best = kInf;
        for (const auto& q : to) {
          best = std::min(best, (from[i] - q).squaredNorm());
          if (best <= worst) break;  // cannot raise the maximum
        }
        worst = std::max(worst, best);
      }
      partial[c] = worst;
    }
  });
  return std::sqrt(*std::max_element(partial.begin(), partial.end()));
}

double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b, int workers) {
  return std::max(directed_hausdorff(a, b, workers), directed_hausdorff(b, a, workers));
}

namespace {

void check_schedule(const std::vector<double>& schedule) {
  if (schedule.empty()) throw Error("eps schedule is empty");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] > 0.0)) throw Error("eps schedule must be positive");
    if (k > 0 && !(schedule[k] < schedule[k - 1])) {
      throw Error("eps schedule must be strictly decreasing");
    }
  }
}

}  // namespace

std::pair<ConeApprox, TangentReport> tangent_cone_estimate(const ConflictComplex& complex,
                                                           const Point& x0,
                                                           const std::vector<double>& schedule,
                                                           int workers) {
  check_schedule(schedule);
  TangentReport report;
  report.x0 = x0;
  report.eps = schedule;
  report.resolution = complex.resolution;
  report.spacing = complex.spacing;
  std::vector<RescaledSlice> slices;
  for (double e : schedule) slices.push_back(sphere_slice(complex, x0, e));
  for (std::size_t k = 1; k < slices.size(); ++k) {
    const auto& a = slices[k - 1].directions;
    const auto& b = slices[k].directions;
    report.d_successive.push_back(a.empty() || b.empty() ? kInf : hausdorff(a, b, workers));
  }
  ConeApprox cone{x0, slices.back().directions};
  return {std::move(cone), std::move(report)};
}

bool non_increasing_with_jitter(const std::vector<double>& values, double jitter) {
  // Values at round-off level are compared against a small absolute floor.
  constexpr double kFloor = 1e-6;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (!(values[k] <= (1.0 + jitter) * std::max(values[k - 1], kFloor))) return false;
  }
  return true;
}

std::vector<Point> random_directions(int dimension, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Point> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    Point u(normal(rng), normal(rng), dimension == 3 ? normal(rng) : 0.0);
    const double n = u.norm();
    if (n < 1e-12) continue;
    out.push_back(u / n);
  }
  return out;
}

TerritoryCheck territory_directions(const Scene& scene, const SupportSet& support, int samples,
                                    double radius, double band, std::uint64_t seed) {
  TerritoryCheck out;
  out.samples = samples;
  out.probe_radius = radius;
  int agree = 0;
  for (const auto& u : random_directions(scene.dimension(), samples, seed)) {
    const TerritoryLabel s = spherical_label(support, u);
    if (s.argmin.size() != 1 || s.margin < band) continue;
    ++out.compared;
    const TerritoryLabel e = label(scene, support.x0 + radius * u);
    if (e.argmin == s.argmin) ++agree;
  }
  out.agreement = out.compared > 0 ? static_cast<double>(agree) / out.compared : 0.0;
  return out;
}

std::vector<double> territory_interior_fractions(const Scene& scene, const Point& x0,
                                                 const std::vector<int>& sites, int samples,
                                                 double radius, std::uint64_t seed) {
  std::vector<int> hits(sites.size(), 0);
  for (const auto& u : random_directions(scene.dimension(), samples, seed)) {
    const TerritoryLabel l = label(scene, x0 + radius * u);
    if (l.argmin.size() != 1) continue;
    for (std::size_t k = 0; k < sites.size(); ++k) {
      if (l.argmin[0] == sites[k]) ++hits[k];
    }
  }
  std::vector<double> out;
  for (int h : hits) out.push_back(samples > 0 ? static_cast<double>(h) / samples : 0.0);
  return out;
}

TangentReport verify_tangent_cone(const Scene& scene, const Point& x0,
                                  const std::vector<double>& schedule,
                                  const VerifyOptions& options) {
  if (scene.metric() != Metric::euclidean) {
    throw Error("tangent cone verification requires the Euclidean metric");
  }
  const DistanceProfile profile = min_distance_profile(scene, x0);
  if (profile.achieving.size() < 2) {
    std::ostringstream msg;
    msg << "not a conflict point: only site '" << scene.site(profile.achieving[0]).id
        << "' attains the minimal distance " << profile.r0;
    throw Error(msg.str());
  }
  check_schedule(schedule);

  const Window window = window_around(x0, options.window_factor * schedule.front(),
                                      scene.dimension());
  ExtractOptions ex;
  ex.resolution = options.resolution;
  ex.workers = options.workers;
  const ConflictComplex complex = extract_conflict(scene, window, ex);

  auto [cone, report] = tangent_cone_estimate(complex, x0, schedule, options.workers);
  report.r0 = profile.r0;
  report.achieving = profile.achieving;
  report.accept_tol = options.accept_tol;

  const SupportSet support = support_sets(scene, x0);
  report.excluded_supports = support.excluded();
  const SphericalComplex spherical =
      spherical_conflict(support, SphericalOptions{options.sphere_resolution});

  for (double e : schedule) {
    const RescaledSlice slice = sphere_slice(complex, x0, e);
    report.d_to_spherical.push_back(
        slice.directions.empty() || spherical.vertices.empty()
            ? kInf
            : hausdorff(slice.directions, spherical.vertices, options.workers));
  }
  report.monotone = non_increasing_with_jitter(report.d_to_spherical, options.jitter);
  report.final_within = report.d_to_spherical.back() <= options.accept_tol;
  report.verdict = report.monotone && report.final_within ? "PASS" : "FAIL";

  report.territory =
      territory_directions(scene, support, options.territory_samples,
                           options.territory_radius * profile.r0, 2.0 * options.accept_tol,
                           options.seed);
  report.territory.sites = profile.achieving;
  report.territory.cap_samples = options.cap_samples;
  report.territory.cap_radius = schedule.back();
  report.territory.interior_fraction =
      territory_interior_fractions(scene, x0, profile.achieving, options.cap_samples,
                                   schedule.back(), options.seed + 1);
  report.territory_pass = report.territory.compared > 0 && report.territory.agreement >= 0.99;
  return report;
}

}  // namespace conflict
