#include "conflict/spherical.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <algorithm>
#include <random>

using namespace conflict;
using namespace testing_support;

namespace {

double to_circle_line(const Point& u) {
  // Distance from a unit vector to the union of the two great circles u3 = +-u1.
  const double a = std::abs(u[2] - u[0]) / std::sqrt(2.0);
  const double b = std::abs(u[2] + u[0]) / std::sqrt(2.0);
  return std::min(a, b);
}

std::vector<Point> sorted(std::vector<Point> v) {
  const auto round = [](double x) { return std::round(x * 1e6); };
  std::sort(v.begin(), v.end(), [&](const Point& a, const Point& b) {
    for (int k = 0; k < 3; ++k) {
      if (round(a[k]) != round(b[k])) return round(a[k]) < round(b[k]);
    }
    return false;
  });
  return v;
}

}  // namespace

TEST_CASE("min distance profile") {
  const DistanceProfile s = min_distance_profile(sheets_scene(), Point::Zero());
  CHECK(s.r0 == doctest::Approx(1.0));
  CHECK(s.achieving == std::vector<int>{0, 1});

  const DistanceProfile t = min_distance_profile(two_points_2d(), Point::Zero());
  CHECK(t.r0 == doctest::Approx(1.0));
  CHECK(t.achieving.size() == 2);

  const DistanceProfile h = min_distance_profile(two_points_2d(), p2(0.5, 0));
  CHECK(h.r0 == doctest::Approx(0.5));
  CHECK(h.achieving == std::vector<int>{0});

  CHECK_THROWS_AS(min_distance_profile(two_points_2d(), p2(1, 0)), Error);
}

TEST_CASE("supports of the two-sheet scene are four points") {
  const SupportSet s = support_sets(sheets_scene(), Point::Zero());
  REQUIRE(s.sites.size() == 2);
  const auto has = [](const SiteSupport& sup, const Point& p) {
    return std::any_of(sup.points.begin(), sup.points.end(), [&](const Point& u) { return (u - p).norm() < 1e-12; });
  };
  CHECK(s.sites[0].points.size() == 2);
  CHECK(has(s.sites[0], Point(0, 0, 1)));
  CHECK(has(s.sites[0], Point(0, 0, -1)));
  CHECK(s.sites[1].points.size() == 2);
  CHECK(has(s.sites[1], Point(1, 0, 0)));
  CHECK(has(s.sites[1], Point(-1, 0, 0)));
  CHECK(s.excluded().empty());
  for (const auto& sup : s.sites) {
    for (const auto& y : sup.samples) {
      CHECK(std::abs((y - s.x0).norm() - s.r0) <= 1e-10);
      CHECK(distance(sheets_scene().site(sup.site), y) <= 1e-8);
    }
  }
}

TEST_CASE("supports: two points and a single achieving site") {
  const SupportSet s = support_sets(two_points_2d(), Point::Zero());
  CHECK(s.sites[0].points.size() == 1);
  CHECK((s.sites[0].points[0] - p2(1, 0)).norm() < 1e-12);
  CHECK((s.sites[1].points[0] - p2(-1, 0)).norm() < 1e-12);

  const SupportSet one = support_sets(two_points_2d(), p2(0.4, 0.1));
  CHECK(one.nonempty().size() == 1);
  CHECK(one.excluded() == std::vector<int>{1});
  CHECK_THROWS_AS(spherical_conflict(one), Error);
}

TEST_CASE("sphere centered at the base point supports the whole sphere") {
  const Scene s(3, {Site{"shell", {SpherePrim{Point::Zero(), 1.0}}}, point_site("far", Point(0, 0, 3))});
  const SupportSet sup = support_sets(s, Point::Zero());
  CHECK(sup.sites[0].whole_sphere);
  CHECK(sup.sites[0].samples.size() >= 2000);
  CHECK(sup.sites[1].empty());
}

TEST_CASE("geodesic distance") {
  const Point u(1, 0, 0), v(0, 0, 1);
  CHECK(geodesic_distance(u, u) == 0.0);
  CHECK(geodesic_distance(u, -u) == doctest::Approx(std::numbers::pi));
  CHECK(geodesic_distance(u, v) == doctest::Approx(std::numbers::pi / 2));
  CHECK_THROWS_AS(geodesic_distance(Point(2, 0, 0), v), Error);
}

TEST_CASE("circle conflict sets") {
  SUBCASE("antipodal points") {
    const SphericalComplex c = spherical_conflict(support_sets(two_points_2d(), Point::Zero()));
    REQUIRE(c.vertices.size() == 2);
    for (const auto& u : c.vertices) CHECK(std::abs(u[0]) <= 1e-9);
    CHECK(c.vertices[0][1] * c.vertices[1][1] < 0);
  }
  SUBCASE("three equally spaced points") {
    const Scene s = points_2d(circle_points({90, 210, 330}));
    const SphericalComplex c = spherical_conflict(support_sets(s, Point::Zero()));
    REQUIRE(c.vertices.size() == 3);
    for (const auto& u : c.vertices) {
      double best = 1.0;
      for (const auto& m : circle_points({30, 150, 270})) best = std::min(best, (u - m).norm());
      CHECK(best <= 1e-8);
      CHECK(std::abs(u.norm() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("sphere conflict of the two-sheet supports is two great circles") {
  const SupportSet sup = support_sets(sheets_scene(), Point::Zero());
  const SphericalComplex c = spherical_conflict(sup);
  REQUIRE(!c.vertices.empty());
  for (const auto& u : c.vertices) {
    CHECK(std::abs(u.norm() - 1.0) <= 1e-12);
    CHECK(to_circle_line(u) <= 1e-6);
  }
  for (std::size_t v = 0; v < c.vertices.size(); ++v) CHECK(c.residuals[v] <= 1e-8);

  // Oracle: brute-force labeling of a Fibonacci sphere finds the same curves.
  const auto band = brute_geodesic_boundary(
      {{Point(0, 0, 1), Point(0, 0, -1)}, {Point(1, 0, 0), Point(-1, 0, 0)}}, fibonacci_sphere(100000), 0.01);
  REQUIRE(band.size() > 100);
  for (const auto& u : band) CHECK(to_circle_line(u) <= 0.01);
  std::vector<Point> verts = c.vertices;
  CHECK(brute_directed_hausdorff(band, verts) <= 0.03);
  CHECK(brute_directed_hausdorff(diagonal_great_circles(360), verts) <= 0.03);

  // Only curve segments.
  REQUIRE(!c.arcs.empty());
  for (const auto& a : c.arcs) CHECK(a[0] != a[1]);
}

TEST_CASE("spherical vertices are equidistant and globally minimal") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<Site> sites;
    for (int k = 0; k < 4; ++k) {
      const Point u = Point(g(rng), g(rng), g(rng)).normalized();
      sites.push_back(point_site("s" + std::to_string(k), u));
    }
    const Scene s(3, std::move(sites));
    const SupportSet sup = support_sets(s, Point::Zero());
    REQUIRE(sup.nonempty().size() == 4);
    const SphericalComplex c = spherical_conflict(sup, {4});
    for (std::size_t v = 0; v < c.vertices.size(); ++v) {
      const Point& u = c.vertices[v];
      std::vector<double> d;
      for (const auto& site : sup.sites) d.push_back(angle(u, site.points[0]));
      const auto [i, j] = c.vertex_pairs[v];
      CHECK(std::abs(d[i] - d[j]) <= 1e-8);
      for (double other : d) CHECK(other >= std::min(d[i], d[j]) - 1e-8);
    }
  }
}

TEST_CASE("rotating the supports rotates the spherical conflict set") {
  const Scene s(3, {point_site("a", Point(1, 0, 0)), point_site("b", Point(0, 1, 0)),
                    point_site("c", Point(0, 0, 1))});
  // The cyclic coordinate permutation is a symmetry of the icosphere grid, so both
  // runs sample the same directions.
  Eigen::Matrix3d rot;
  rot << 0, 0, 1, 1, 0, 0, 0, 1, 0;
  std::vector<Site> turned;
  for (const auto& site : s.sites()) turned.push_back(point_site(site.id, rot * std::get<PointPrim>(site.primitives[0]).coords));
  const SphericalComplex a = spherical_conflict(support_sets(s, Point::Zero()), {4});
  const SphericalComplex b = spherical_conflict(support_sets(Scene(3, std::move(turned)), Point::Zero()), {4});
  std::vector<Point> mapped;
  for (const auto& u : a.vertices) mapped.push_back(rot * u);
  const auto x = sorted(mapped), y = sorted(b.vertices);
  REQUIRE(x.size() == y.size());
  for (std::size_t k = 0; k < x.size(); ++k) CHECK((x[k] - y[k]).norm() <= 1e-8);

  // Circle: any rotation by a multiple of the sampling step.
  const int n = 4096;
  const double step = 2 * std::numbers::pi / n * 37;
  const Eigen::Matrix3d r2 = Eigen::AngleAxisd(step, Point::UnitZ()).toRotationMatrix();
  const auto pts = circle_points({20, 135, 250});
  std::vector<Point> pts2;
  for (const auto& p : pts) pts2.push_back(r2 * p);
  const SphericalComplex c = spherical_conflict(support_sets(points_2d(pts), Point::Zero()));
  const SphericalComplex d = spherical_conflict(support_sets(points_2d(pts2), Point::Zero()));
  std::vector<Point> cm;
  for (const auto& u : c.vertices) cm.push_back(r2 * u);
  CHECK(std::max(brute_directed_hausdorff(cm, d.vertices), brute_directed_hausdorff(d.vertices, cm)) <= 1e-8);
}

TEST_CASE("cone over directions") {
  SphericalComplex single;
  single.vertices = {p2(1, 0)};
  const Point x0 = p2(0.3, -0.2);
  const auto pts = cone(x0, single, {1.0, 2.0});
  REQUIRE(pts.size() == 2);
  CHECK((pts[0] - (x0 + p2(1, 0))).norm() < 1e-15);
  CHECK((pts[1] - (x0 + p2(2, 0))).norm() < 1e-15);

  const SphericalComplex c = spherical_conflict(support_sets(sheets_scene(), Point::Zero()));
  for (const auto& p : cone(Point::Zero(), c, {1.0})) {
    CHECK(std::abs(p.norm() - 1.0) <= 1e-12);
    CHECK(std::min(std::abs(p[2] - p[0]), std::abs(p[2] + p[0])) <= 2e-6);
  }
  CHECK(cone(x0, SphericalComplex{}, {1.0}).empty());
  CHECK_THROWS_AS(cone(x0, single, {0.0}), Error);
}

TEST_CASE("annular shadow") {
  SUBCASE("single point supports") {
    const SupportSet sup = support_sets(two_points_2d(), Point::Zero());
    const Scene shadow = annular_shadow(sup, 0.1);
    REQUIRE(shadow.size() == 2);
    for (const auto& site : shadow.sites()) {
      REQUIRE(site.primitives.size() == 1);
      const auto& seg = std::get<SegmentPrim>(site.primitives[0]);
      CHECK((seg.b - seg.a).norm() == doctest::Approx(0.1));
      CHECK(seg.a.norm() == doctest::Approx(1.0));
    }
    // One nonempty support cannot form a scene.
    CHECK_THROWS_AS(annular_shadow(support_sets(two_points_2d(), p2(0.5, 0)), 0.1), SceneError);
  }
  SUBCASE("two-sheet supports give four radial segments") {
    const SupportSet sup = support_sets(sheets_scene(), Point::Zero());
    const Scene shadow = annular_shadow(sup, 0.05);
    int segments = 0;
    for (const auto& site : shadow.sites()) {
      for (const auto& p : site.primitives) {
        const auto& seg = std::get<SegmentPrim>(p);
        CHECK(seg.a.norm() == doctest::Approx(1.0));
        CHECK(seg.b.norm() == doctest::Approx(1.05));
        CHECK(seg.a.normalized().cross(seg.b.normalized()).norm() <= 1e-12);
        ++segments;
      }
    }
    CHECK(segments == 4);
  }
  SUBCASE("labels agree with the original scene near the base point") {
    const Scene s = points_2d(circle_points({15, 140, 260}));
    const SupportSet sup = support_sets(s, Point::Zero());
    const Scene shadow = annular_shadow(sup, 0.2);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int tested = 0;
    while (tested < 200) {
      const Point x = p2(u(rng), u(rng)) / 3.0;
      if (x.norm() >= sup.r0 / 3) continue;
      CHECK(label(s, x).argmin == label(shadow, x).argmin);
      ++tested;
    }
  }
  CHECK_THROWS_AS(annular_shadow(support_sets(two_points_2d(), Point::Zero()), 0.0), Error);
}

TEST_CASE("cone identity for points on the unit circle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> deg(0.0, 360.0);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> angles;
    while (angles.size() < 4) {
      const double a = deg(rng);
      bool ok = true;
      for (double b : angles) ok = ok && std::abs(std::remainder(a - b, 360.0)) > 20.0;
      if (ok) angles.push_back(a);
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
    REQUIRE(!projected.empty());
    const double tol = 2.0 * c.spacing;
    CHECK(brute_directed_hausdorff(projected, sph.vertices) <= tol);
    CHECK(brute_directed_hausdorff(sph.vertices, projected) <= tol);
  }
}
