// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include "conflict/cli.hpp"
#include "conflict/io.hpp"
#include "conflict/metrics.hpp"
#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

using namespace conflict;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double deg(double rad) { return rad * 180.0 / std::numbers::pi; }

Outcome bisector() {
  const auto t0 = Clock::now();
  ExtractOptions o;
  o.resolution = 128;
  const ConflictComplex c = extract_conflict(two_points_2d(), window_around(Point::Zero(), 2.0, 2), o);
  double worst = 0.0;
  for (const auto& v : c.vertices) worst = std::max(worst, std::abs(v[0]));
  const double t = seconds_since(t0);
  return {!c.vertices.empty() && worst <= 1e-6 && t < 5.0,
          fmt("%zu vertices, max |x1| = %.3g (<= 1e-6), %.2f s (< 5 s)", c.vertices.size(), worst, t)};
}

Outcome tangent_cone() {
  const auto t0 = Clock::now();
  const Scene s = sheets_scene();
  const std::vector<double> schedule{0.4, 0.2, 0.1, 0.05};
  VerifyOptions vo;
  vo.resolution = 96;
  const TangentReport r = verify_tangent_cone(s, Point::Zero(), schedule, vo);

  // Oracle: boundary directions found by brute-force geodesic labeling of a Fibonacci sphere
  // lie on the diagonal great circles; those circles are the reference set.
  const auto band = brute_geodesic_boundary(
      {{Point(0, 0, 1), Point(0, 0, -1)}, {Point(1, 0, 0), Point(-1, 0, 0)}}, fibonacci_sphere(200000), 0.02);
  const auto circles = diagonal_great_circles(2000);
  const double oracle_check = brute_directed_hausdorff(band, circles);
  const double oracle_cover = brute_directed_hausdorff(circles, band);

  ExtractOptions o;
  o.resolution = vo.resolution;
  const ConflictComplex local =
      extract_conflict(s, window_around(Point::Zero(), vo.window_factor * schedule.front(), 3), o);
  std::vector<double> d;
  for (double eps : schedule) d.push_back(hausdorff(sphere_slice(local, Point::Zero(), eps).directions, circles, 4));
  const bool monotone = non_increasing_with_jitter(d, 0.2);
  const double t = seconds_since(t0);
  const bool ok = oracle_check <= 0.02 && oracle_cover <= 0.02 && monotone && d.back() <= 0.05 &&
                  r.verdict == "PASS" && t < 60.0;
  return {ok, fmt("oracle circles vs labeling %.3g/%.3g; d = %.4f %.4f %.4f %.4f (monotone %s, final <= 0.05); "
                  "library verdict %s; %.1f s (< 60 s)",
                  oracle_check, oracle_cover, d[0], d[1], d[2], d[3], monotone ? "yes" : "no",
                  r.verdict.c_str(), t)};
}

Outcome cone_identity() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> angle_deg(0.0, 360.0);
  bool ok = true;
  double worst = 0.0, tol = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> angles;
    while (angles.size() < 3) {
      const double a = angle_deg(rng);
      bool apart = true;
      for (double b : angles) apart = apart && std::abs(std::remainder(a - b, 360.0)) > 20.0;
      if (apart) angles.push_back(a);
    }
    const Scene s = points_2d(circle_points(angles));
    ExtractOptions o;
    o.resolution = 128;
    const ConflictComplex c = extract_conflict(s, window_around(Point::Zero(), 1.5, 2), o);
    const SphericalComplex sph = spherical_conflict(support_sets(s, Point::Zero()));
    std::vector<Point> projected;
    for (const auto& v : c.vertices) {
      if (v.norm() >= 0.5 && v.norm() <= 1.5) projected.push_back(v.normalized());
    }
    tol = 2.0 * c.spacing;
    if (projected.empty() || sph.vertices.empty()) {
      ok = false;
      continue;
    }
    const double h = std::max(brute_directed_hausdorff(projected, sph.vertices),
                              brute_directed_hausdorff(sph.vertices, projected));
    worst = std::max(worst, h);
    ok = ok && h <= tol;
  }
  return {ok, fmt("3 configurations of 3 sites; max Hausdorff %.3g (<= 2 grid steps = %.3g)", worst, tol)};
}

Outcome codimension() {
  bool ok = true;
  std::string dims;
  const std::vector<std::pair<std::string, Scene>> scenes{
      {"paper", demo_scene()},
      {"bisector", two_points_2d()},
      {"triple", points_2d(circle_points({90, 210, 330}))},
      {"focus-plane", focus_plane_scene()}};
  for (const auto& [name, s] : scenes) {
    ExtractOptions o;
    o.resolution = s.dimension() == 2 ? 128 : 48;
    const DimensionReport r = dimension_check(extract_conflict(s, window_around(Point::Zero(), 2.0, s.dimension()), o));
    ok = ok && r.verdict == "PASS";
    dims += name + " " + r.verdict + ", ";
  }

  // Spherical conflict on S^2: curve segments, each arc shorter than two icosphere edges.
  const SphericalComplex sph = spherical_conflict(support_sets(demo_scene(), Point::Zero()));
  const Icosphere ico = make_icosphere(default_spherical_resolution(3));
  double edge = 0.0;
  for (const auto& f : ico.faces) edge = std::max(edge, (ico.vertices[f[0]] - ico.vertices[f[1]]).norm());
  bool curves = !sph.arcs.empty();
  std::vector<int> degree(sph.vertices.size(), 0);
  for (const auto& a : sph.arcs) {
    curves = curves && a[0] != a[1] && (sph.vertices[a[0]] - sph.vertices[a[1]]).norm() <= 2 * edge;
    ++degree[a[0]];
    ++degree[a[1]];
  }
  int max_degree = 0;
  for (int d : degree) max_degree = std::max(max_degree, d);
  curves = curves && max_degree <= 4;
  ok = ok && curves;

  const auto caps = territory_interior_fractions(demo_scene(), Point::Zero(), {0, 1}, 1000, 0.05, 1);
  for (double f : caps) ok = ok && f >= 0.05;
  return {ok, fmt("dimension_check %s; S^2 set: %zu arcs, max vertex degree %d; caps %.3f %.3f (>= 0.05)",
                  dims.substr(0, dims.size() - 2).c_str(), sph.arcs.size(), max_degree, caps[0], caps[1])};
}

Outcome taxicab() {
  const Scene l1(2, {point_site("a", p2(0, 0)), point_site("b", p2(1, 1))}, Metric::taxicab);
  ExtractOptions o;
  o.resolution = 512;
  const Window w{p2(-1, -1), p2(2, 2)};
  const double tie_l1 = extract_conflict(l1, w, o).tie_area_fraction;
  const double tie_l2 = extract_conflict(l1.with_metric(Metric::euclidean), w, o).tie_area_fraction;

  // Brute-force grid labeling at 512 cells per axis: a cell is tie region when all four
  // corners are equidistant.
  const int n = 512;
  const auto corner = [&](int i) { return -1 + 3.0 * i / n; };
  const auto tie1 = [](double x, double y) {
    return std::abs((std::abs(x) + std::abs(y)) - (std::abs(x - 1) + std::abs(y - 1))) <= 1e-9;
  };
  const auto tie2 = [](double x, double y) { return std::abs(std::hypot(x, y) - std::hypot(x - 1, y - 1)) <= 1e-9; };
  int ties1 = 0, ties2 = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x0 = corner(i), x1 = corner(i + 1), y0 = corner(j), y1 = corner(j + 1);
      ties1 += tie1(x0, y0) && tie1(x1, y0) && tie1(x0, y1) && tie1(x1, y1);
      ties2 += tie2(x0, y0) && tie2(x1, y0) && tie2(x0, y1) && tie2(x1, y1);
    }
  }
  const double o1 = static_cast<double>(ties1) / (n * n), o2 = static_cast<double>(ties2) / (n * n);
  const bool ok = tie_l1 >= 0.05 && tie_l2 <= 0.001 && o1 >= 0.05 && o2 <= 0.001;
  return {ok, fmt("tie fraction L1 %.4f (oracle %.4f, >= 0.05), Euclidean %.4f (oracle %.4f, <= 0.001)",
                  tie_l1, o1, tie_l2, o2)};
}

Outcome no_cusp() {
  const NoCuspReport eq = no_cusp_check(points_2d(circle_points({90, 210, 330})), Point::Zero(), {0.1, 0.05, 0.025});
  bool ok = eq.verdict == "PASS" && eq.gaps_deg.size() == 3;
  for (double g : eq.gaps_deg) ok = ok && std::abs(g - 120.0) <= 2.0;

  std::mt19937_64 rng(2024);
  int junctions = 0, passed = 0;
  double worst_dev = 0.0, smallest = 360.0;
  for (int k = 0; k < 25; ++k) {
    const RandomJunctionScene rs = random_junction_scene(rng, 3 + k % 3);
    const Scene s = points_2d(rs.sites);
    for (const auto& j : rs.junctions) {
      ++junctions;
      const double f = j.feature;
      const NoCuspReport r = no_cusp_check(s, j.center, {0.5 * f, 0.25 * f, 0.125 * f});
      bool agree = r.branches.directions.size() == 3;
      if (agree) {
        for (const auto& oracle : junction_branches(rs, j)) {
          double best = 180.0;
          for (const auto& u : r.branches.directions) best = std::min(best, deg(angle(u, oracle)));
          worst_dev = std::max(worst_dev, best);
          agree = agree && best <= 2.0;
        }
      }
      smallest = std::min(smallest, r.min_angle_deg);
      passed += r.verdict == "PASS" && agree;
    }
  }
  ok = ok && passed == junctions;
  return {ok, fmt("equilateral gaps %.2f %.2f %.2f (120 +- 2); random: %d/%d junctions PASS, "
                  "max deviation from bisectors %.3f deg (<= 2), min branch angle %.1f deg",
                  eq.gaps_deg.size() > 0 ? eq.gaps_deg[0] : 0.0, eq.gaps_deg.size() > 1 ? eq.gaps_deg[1] : 0.0,
                  eq.gaps_deg.size() > 2 ? eq.gaps_deg[2] : 0.0, passed, junctions, worst_dev, smallest)};
}

Outcome embedding() {
  ExtractOptions o;
  o.resolution = 128;
  o.workers = 4;
  const ConflictComplex c = extract_conflict(demo_scene(), window_around(Point::Zero(), 0.6, 3), o);
  EmbeddingOptions eo;
  eo.workers = 4;
  const std::vector<double> thetas{0.4, 0.2, 0.1};
  const EmbeddingReport r = embedding_scan(GeodesicGraph::build(c), c, Point::Zero(), thetas, eo);
  bool ok = r.verdict == "diverging" && r.scales.size() == 3;
  std::string ratios;
  for (std::size_t k = 0; k < r.scales.size(); ++k) {
    const double th = thetas[k];
    const double oracle = 2.0 * 2.0 * std::sin(th / 2) / (2.0 * (1.0 - std::cos(th)));
    ok = ok && std::abs(r.scales[k].ratio - oracle) <= 0.15 * oracle;
    ratios += fmt("%.2f (oracle %.2f) ", r.scales[k].ratio, oracle);
  }
  const ConflictComplex planes = make_transversal_planes_complex();
  const EmbeddingReport cone = embedding_scan(GeodesicGraph::build(planes), planes, Point::Zero(), thetas, eo);
  ok = ok && cone.verdict == "embedded";
  return {ok, fmt("ratios %s-> %s; transversal planes -> %s", ratios.c_str(), r.verdict.c_str(), cone.verdict.c_str())};
}

Outcome links() {
  ExtractOptions o;
  o.resolution = 96;
  const ConflictComplex c = extract_conflict(demo_scene(), window_around(Point::Zero(), 0.5, 3), o);
  const int germ = link_components(c, Point::Zero(), 0.2);
  const int cone = link_components(make_transversal_planes_complex(), Point::Zero(), 0.2);
  return {germ == 2 && cone == 1, fmt("complex %d (expect 2), tangent cone %d (expect 1) at eps 0.2", germ, cone)};
}

std::vector<int> argmin_clipped(const ClippedScene& c, std::size_t n, const Point& x) {
  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) d[j] = c.distance(j, x);
  const double m = *std::min_element(d.begin(), d.end());
  std::vector<int> out;
  for (std::size_t j = 0; j < n; ++j) {
    if (d[j] <= m + kTieTolerance) out.push_back(static_cast<int>(j));
  }
  return out;
}

Outcome localization() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> g;
  int clip_agree = 0, clip_total = 0, shadow_agree = 0, shadow_total = 0;
  const auto in_ball = [&](const Point& x0, double r, int dim) {
    while (true) {
      const Point p(u(rng), u(rng), dim == 3 ? u(rng) : 0.0);
      if (p.norm() < 1.0) return Point(x0 + r * p);
    }
  };
  for (int trial = 0; trial < 10; ++trial) {
    // Clipping at r0 + eps keeps labels within eps / 3.
    std::vector<Site> sites;
    sites.push_back(Site{"plane", {HyperplanePrim{Point(0.2 * u(rng), 0.2 * u(rng), 1).normalized(), 1.2 + 0.1 * u(rng)}}});
    sites.push_back(Site{"ball", {BallPrim{Point(1.5 + 0.2 * u(rng), 0.3 * u(rng), 0), 0.4}}});
    sites.push_back(Site{"segment", {SegmentPrim{Point(-1.5, -1, 0.5 * u(rng)), Point(-1.2, 1, 0.5 * u(rng))}}});
    sites.push_back(Site{"points", {PointSetPrim{{Point(0, -1.6, 0.1), Point(0.3, -1.8, 0)}}}});
    const Scene s(3, sites);
    const Point x0(0.1 * u(rng), 0.1 * u(rng), 0.1 * u(rng));
    const double eps = 0.3;
    const ClippedScene c = clip_scene(s, x0, min_distance_profile(s, x0).r0 + eps);
    for (int k = 0; k < 200; ++k) {
      const Point x = in_ball(x0, eps / 3.0, 3);
      clip_agree += label(s, x).argmin == argmin_clipped(c, s.size(), x);
      ++clip_total;
    }

    // Point sites on a common sphere lie in their own shadow.
    const int dim = 2 + trial % 2;
    const Point center(u(rng), u(rng), dim == 3 ? u(rng) : 0.0);
    const double r0 = 0.5 + 0.5 * std::abs(u(rng));
    std::vector<Site> on_sphere;
    for (int m = 0; m < 3 + trial % 3; ++m) {
      Point d(g(rng), g(rng), dim == 3 ? g(rng) : 0.0);
      on_sphere.push_back(point_site("p" + std::to_string(m), center + r0 * d.normalized()));
    }
    const Scene ps(dim, on_sphere);
    const SupportSet sup = support_sets(ps, center);
    const Scene shadow = annular_shadow(sup, 0.05 * r0);
    for (int k = 0; k < 200; ++k) {
      const Point x = in_ball(center, sup.r0 / 3.0, dim);
      shadow_agree += label(ps, x).argmin == label(shadow, x).argmin;
      ++shadow_total;
    }
  }
  return {clip_agree == clip_total && shadow_agree == shadow_total,
          fmt("clipped labels %d/%d, annular shadow labels %d/%d over 10 scenes", clip_agree, clip_total,
              shadow_agree, shadow_total)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("conflict_acceptance_" + std::to_string(std::random_device{}()));
  std::map<std::string, std::string> runs[2];
  const char* workers[2] = {"1", "8"};
  int codes[2];
  double secs[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path dir = root / workers[k];
    fs::create_directories(dir);
    std::ostringstream out, err;
    const auto t0 = Clock::now();
    codes[k] = run({"demo", "paper-example", "--workers", workers[k], "--out", (dir / "paper").string()}, out, err);
    secs[k] = seconds_since(t0);
    runs[k]["stdout"] = out.str();
    for (const auto& e : fs::directory_iterator(dir)) runs[k][e.path().filename().string()] = slurp(e.path());
  }
  fs::remove_all(root);
  const bool same = runs[0] == runs[1];
  return {same && codes[0] == 0 && codes[1] == 0,
          fmt("demo exit %d/%d, %zu outputs %s (%.1f s with 1 worker, %.1f s with 8)", codes[0], codes[1],
              runs[0].size(), same ? "byte-identical" : "DIFFER", secs[0], secs[1])};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"bisector oracle", bisector},
      {"tangent cone of the two-sheet scene", tangent_cone},
      {"cone identity on the unit circle", cone_identity},
      {"codimension one and territory caps", codimension},
      {"taxicab tie regions", taxicab},
      {"planar junctions have no cusps", no_cusp},
      {"two-sheet complex is not normally embedded", embedding},
      {"link components: complex vs tangent cone", links},
      {"clipping and shadow localization", localization},
      {"determinism across worker counts", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
