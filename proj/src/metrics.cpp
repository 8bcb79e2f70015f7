#include "conflict/metrics.hpp"

#include "conflict/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

namespace conflict {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  int count() {
    int n = 0;
    for (std::size_t i = 0; i < parent.size(); ++i) n += find(static_cast<int>(i)) == static_cast<int>(i);
    return n;
  }
};

struct CellHash {
  std::size_t operator()(const std::array<std::int64_t, 3>& k) const {
    std::size_t h = 1469598103934665603ull;
    for (auto v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

double deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace

GeodesicGraph GeodesicGraph::build(const ConflictComplex& complex) {
  GeodesicGraph g;
  std::unordered_map<std::array<std::int64_t, 3>, std::vector<int>, CellHash> buckets;
  const auto cell_of = [](const Point& p) {
    return std::array<std::int64_t, 3>{static_cast<std::int64_t>(std::floor(p[0] / kGraphSnap)),
                                       static_cast<std::int64_t>(std::floor(p[1] / kGraphSnap)),
                                       static_cast<std::int64_t>(std::floor(p[2] / kGraphSnap))};
  };
  g.vertex_node.resize(complex.vertices.size());
  for (std::size_t v = 0; v < complex.vertices.size(); ++v) {
    const Point& p = complex.vertices[v];
    const auto c = cell_of(p);
    int found = -1;
    for (int dx = -1; dx <= 1 && found < 0; ++dx) {
      for (int dy = -1; dy <= 1 && found < 0; ++dy) {
        for (int dz = -1; dz <= 1 && found < 0; ++dz) {
          auto it = buckets.find({c[0] + dx, c[1] + dy, c[2] + dz});
          if (it == buckets.end()) continue;
          for (int n : it->second) {
            if ((g.nodes[n] - p).norm() <= kGraphSnap) {
              found = n;
              break;
            }
          }
        }
      }
    }
    if (found < 0) {
      found = static_cast<int>(g.nodes.size());
      g.nodes.push_back(p);
      buckets[c].push_back(found);
    }
    g.vertex_node[v] = found;
  }

  std::set<std::array<int, 2>> unique;
  for (const auto& c : complex.cells) {
    const int k = c.arity();
    for (int e = 0; e < (k == 2 ? 1 : 3); ++e) {
      const int a = g.vertex_node[c.v[e]];
      const int b = g.vertex_node[c.v[(e + 1) % k]];
      if (a != b) unique.insert({std::min(a, b), std::max(a, b)});
    }
  }
  g.edges.assign(unique.begin(), unique.end());
  g.adjacency.resize(g.nodes.size());
  double longest = 0.0;
  UnionFind uf(g.nodes.size());
  for (const auto& [a, b] : g.edges) {
    const double w = (g.nodes[a] - g.nodes[b]).norm();
    longest = std::max(longest, w);
    g.adjacency[a].push_back({b, w});
    g.adjacency[b].push_back({a, w});
    uf.unite(a, b);
  }
  std::map<int, int> ids;
  g.component.resize(g.nodes.size());
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    auto [it, inserted] = ids.try_emplace(uf.find(static_cast<int>(n)), static_cast<int>(ids.size()));
    g.component[n] = it->second;
  }
  g.components = static_cast<int>(ids.size());
  g.reach = 2.0 * (complex.spacing > 0.0 ? complex.spacing : longest);
  return g;
}

GraphLocation locate(const GeodesicGraph& graph, const Point& p) {
  if (graph.edges.empty()) throw Error("graph has no edges");
  GraphLocation best;
  best.offset = kInf;
  for (const auto& [a, b] : graph.edges) {
    const Point& pa = graph.nodes[a];
    const Point d = graph.nodes[b] - pa;
    const double t = std::clamp((p - pa).dot(d) / d.squaredNorm(), 0.0, 1.0);
    const Point y = pa + t * d;
    const double off = (p - y).norm();
    if (off < best.offset) best = {a, b, t, off, y};
  }
  return best;
}

std::vector<double> graph_distances_from(const GeodesicGraph& graph, const GraphLocation& from) {
  std::vector<double> dist(graph.nodes.size(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  const double len = (graph.nodes[from.b] - graph.nodes[from.a]).norm();
  const auto seed = [&](int n, double d) {
    if (d < dist[n]) {
      dist[n] = d;
      queue.push({d, n});
    }
  };
  seed(from.a, from.t * len);
  seed(from.b, (1.0 - from.t) * len);
  while (!queue.empty()) {
    const auto [d, n] = queue.top();
    queue.pop();
    if (d > dist[n]) continue;
    for (const auto& e : graph.adjacency[n]) {
      if (d + e.w < dist[e.to]) {
        dist[e.to] = d + e.w;
        queue.push({dist[e.to], e.to});
      }
    }
  }
  return dist;
}

namespace {

double distance_to(const GeodesicGraph& graph, const std::vector<double>& dist,
                   const GraphLocation& from, const GraphLocation& to) {
  const double len = (graph.nodes[to.b] - graph.nodes[to.a]).norm();
  double best = std::min(dist[to.a] + to.t * len, dist[to.b] + (1.0 - to.t) * len);
  const bool same_edge = (from.a == to.a && from.b == to.b);
  if (same_edge) best = std::min(best, (from.point - to.point).norm());
  return best;
}

GraphLocation checked_locate(const GeodesicGraph& graph, const Point& p) {
  const GraphLocation loc = locate(graph, p);
  if (loc.offset > graph.reach) {
    std::ostringstream msg;
    msg << "point (" << p[0] << ", " << p[1] << ", " << p[2] << ") is " << loc.offset
        << " away from the complex (limit " << graph.reach << ")";
    throw Error(msg.str());
  }
  return loc;
}

}  // namespace

double inner_distance(const GeodesicGraph& graph, const Point& p, const Point& q) {
  const GraphLocation lp = checked_locate(graph, p);
  const GraphLocation lq = checked_locate(graph, q);
  return distance_to(graph, graph_distances_from(graph, lp), lp, lq);
}

EmbeddingReport embedding_scan(const GeodesicGraph& graph, const ConflictComplex& complex,
                               const Point& x0, const std::vector<double>& thetas,
                               const EmbeddingOptions& options) {
  if (thetas.size() < 2) throw Error("embedding scan needs at least two scales");
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    if (!(thetas[k] > 0.0) || (k > 0 && !(thetas[k] < thetas[k - 1]))) {
      throw Error("scales must be positive and strictly decreasing");
    }
  }
  EmbeddingReport report;
  report.x0 = x0;
  for (double theta : thetas) {
    EmbeddingScale scale;
    scale.theta = theta;
    scale.radius = 2.0 * std::sin(theta / 2.0);
    const RescaledSlice slice = sphere_slice(complex, x0, scale.radius);
    const std::size_t n = slice.nodes.size();
    if (n < 2) throw Error("link of x0 has fewer than two points; x0 is not on the complex");
    scale.candidates = static_cast<int>(n);

    UnionFind uf(n);
    for (const auto& [a, b] : slice.links) uf.unite(a, b);
    std::vector<int> comp(n);
    for (std::size_t i = 0; i < n; ++i) comp[i] = uf.find(static_cast<int>(i));
    scale.link_components = uf.count();

    // Candidate pairs: across link components when the link splits (smallest outer distance
    // first), otherwise among a subsample of the link at outer distance closest to the radius.
    const auto outer = [&](const std::array<int, 2>& c) {
      return (slice.nodes[c[0]].point - slice.nodes[c[1]].point).norm();
    };
    std::vector<std::array<int, 2>> cand;
    if (scale.link_components >= 2) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (comp[i] != comp[j]) cand.push_back({static_cast<int>(i), static_cast<int>(j)});
        }
      }
      std::stable_sort(cand.begin(), cand.end(),
                       [&](const auto& x, const auto& y) { return outer(x) < outer(y); });
    } else {
      const std::size_t m = std::min<std::size_t>(n, 32);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
          cand.push_back({static_cast<int>(i * n / m), static_cast<int>(j * n / m)});
        }
      }
      const auto off = [&](const auto& c) { return std::abs(outer(c) - scale.radius); };
      std::stable_sort(cand.begin(), cand.end(),
                       [&](const auto& x, const auto& y) { return off(x) < off(y); });
    }
    if (static_cast<int>(cand.size()) > options.pairs) cand.resize(options.pairs);

    const auto location = [&](int node) {
      const auto& nd = slice.nodes[node];
      GraphLocation loc;
      loc.a = graph.vertex_node[nd.a];
      loc.b = graph.vertex_node[nd.b];
      loc.t = nd.t;
      if (loc.a > loc.b) {
        std::swap(loc.a, loc.b);
        loc.t = 1.0 - loc.t;
      }
      loc.point = nd.point;
      return loc;
    };
    scale.pairs.resize(cand.size());
    parallel_for(cand.size(), options.workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        const GraphLocation lp = location(cand[k][0]);
        const GraphLocation lq = location(cand[k][1]);
        ProbePair& pp = scale.pairs[k];
        pp.p = lp.point;
        pp.q = lq.point;
        pp.outer = (pp.p - pp.q).norm();
        pp.inner = distance_to(graph, graph_distances_from(graph, lp), lp, lq);
        pp.ratio = pp.outer > 0.0 ? pp.inner / pp.outer : kInf;
      }
    });
    for (const auto& pp : scale.pairs) scale.ratio = std::max(scale.ratio, pp.ratio);
    report.scales.push_back(std::move(scale));
  }
  bool diverging = true;
  for (std::size_t k = 1; k < report.scales.size(); ++k) {
    const double g = report.scales[k].ratio / report.scales[k - 1].ratio;
    report.growth.push_back(g);
    if (!(g >= options.growth_threshold)) diverging = false;
  }
  report.verdict = diverging ? "diverging" : "embedded";
  return report;
}

namespace {

// Single-linkage clusters of planar unit directions by angle, ordered by mean angle.
std::vector<std::vector<int>> cluster_directions(const std::vector<Point>& dirs, double linkage) {
  const std::size_t n = dirs.size();
  std::vector<std::pair<double, int>> ang;
  for (std::size_t i = 0; i < n; ++i) {
    double a = std::atan2(dirs[i][1], dirs[i][0]);
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    ang.push_back({a, static_cast<int>(i)});
  }
  std::sort(ang.begin(), ang.end());
  std::vector<std::vector<int>> clusters;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || ang[k].first - ang[k - 1].first > linkage) clusters.emplace_back();
    clusters.back().push_back(ang[k].second);
  }
  if (clusters.size() > 1 &&
      ang.front().first + 2.0 * std::numbers::pi - ang.back().first <= linkage) {
    auto& last = clusters.back();
    clusters.front().insert(clusters.front().end(), last.begin(), last.end());
    clusters.pop_back();
  }
  return clusters;
}

Point cluster_mean(const std::vector<Point>& dirs, const std::vector<int>& members) {
  Point s = Point::Zero();
  for (int i : members) s += dirs[i];
  return s.norm() > 0.0 ? Point(s / s.norm()) : dirs[members.front()];
}

double polar_angle(const Point& u) {
  double a = std::atan2(u[1], u[0]);
  return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

}  // namespace

BranchTangents branch_tangents(const ConflictComplex& complex, const Point& y0,
                               const std::vector<double>& schedule, double linkage_deg) {
  if (complex.dimension != 2) throw Error("branch tangents need a planar complex");
  if (schedule.empty()) throw Error("eps schedule is empty");
  const double linkage = linkage_deg * std::numbers::pi / 180.0;
  BranchTangents out;
  std::vector<std::pair<double, int>> last;
  for (double e : schedule) {
    const RescaledSlice slice = sphere_slice(complex, y0, e);
    const auto clusters = cluster_directions(slice.directions, linkage);
    out.counts.push_back(static_cast<int>(clusters.size()));
    if (e == schedule.back()) {
      std::vector<std::pair<Point, int>> branches;
      for (const auto& c : clusters) {
        branches.push_back({cluster_mean(slice.directions, c), static_cast<int>(c.size())});
      }
      std::sort(branches.begin(), branches.end(), [](const auto& a, const auto& b) {
        return polar_angle(a.first) < polar_angle(b.first);
      });
      for (const auto& [u, size] : branches) {
        out.directions.push_back(u);
        out.sizes.push_back(size);
      }
    }
  }
  const std::size_t n = out.counts.size();
  if (n >= 2 && out.counts[n - 1] != out.counts[n - 2]) {
    std::ostringstream msg;
    msg << "unresolved branching: " << out.counts[n - 2] << " clusters at eps "
        << schedule[n - 2] << " but " << out.counts[n - 1] << " at eps " << schedule[n - 1];
    throw Error(msg.str());
  }
  return out;
}

NoCuspReport no_cusp_check(const Scene& scene, const Point& y0,
                           const std::vector<double>& schedule, const NoCuspOptions& options) {
  if (scene.dimension() != 2 || scene.metric() != Metric::euclidean) {
    throw Error("no-cusp check needs a planar Euclidean scene");
  }
  const DistanceProfile profile = min_distance_profile(scene, y0);
  if (profile.achieving.size() < 2) {
    throw Error("not a conflict point: a single site attains the minimal distance");
  }
  if (schedule.empty()) throw Error("eps schedule is empty");
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    if (!(schedule[k] < schedule[k - 1])) throw Error("eps schedule must be strictly decreasing");
  }
  ExtractOptions ex;
  ex.resolution = options.resolution;
  ex.workers = options.workers;
  const ConflictComplex complex = extract_conflict_2d(
      scene, window_around(y0, options.window_factor * schedule.front(), 2), ex);

  NoCuspReport report;
  report.y0 = y0;
  report.eps = schedule;
  report.threshold_deg = options.min_angle_deg;
  report.branches = branch_tangents(complex, y0, schedule, options.linkage_deg);
  const auto& dirs = report.branches.directions;
  report.min_angle_deg = dirs.size() >= 2 ? 360.0 : 0.0;
  for (std::size_t k = 0; k < dirs.size() && dirs.size() >= 2; ++k) {
    double gap = polar_angle(dirs[(k + 1) % dirs.size()]) - polar_angle(dirs[k]);
    if (gap <= 0.0) gap += 2.0 * std::numbers::pi;
    report.gaps_deg.push_back(deg(gap));
    report.min_angle_deg = std::min(report.min_angle_deg, deg(gap));
  }
  const bool singletons = std::all_of(report.branches.sizes.begin(), report.branches.sizes.end(),
                                      [](int s) { return s == 1; });
  report.verdict = dirs.size() >= 2 && singletons && report.min_angle_deg >= options.min_angle_deg
                       ? "PASS"
                       : "FAIL";
  return report;
}

int link_components(const ConflictComplex& complex, const Point& x0, double eps) {
  const RescaledSlice slice = sphere_slice(complex, x0, eps);
  if (slice.nodes.empty()) throw Error("slice of the complex with the sphere is empty");
  UnionFind uf(slice.nodes.size());
  for (const auto& [a, b] : slice.links) uf.unite(a, b);
  return uf.count();
}

DimensionReport dimension_check(const ConflictComplex& complex) {
  DimensionReport r;
  r.cells = static_cast<int>(complex.cells.size());
  r.tie_area_fraction = complex.tie_area_fraction;
  std::vector<char> used(complex.vertices.size(), 0);
  for (const auto& c : complex.cells) {
    const int k = c.arity();
    bool ok = k == complex.dimension;
    for (int a = 0; a < k; ++a) {
      used[c.v[a]] = 1;
      for (int b = a + 1; b < k; ++b) ok = ok && c.v[a] != c.v[b];
    }
    if (!ok) ++r.wrong_dimension_cells;
  }
  r.isolated_vertices = static_cast<int>(std::count(used.begin(), used.end(), 0));
  r.ambiguous_cells = static_cast<int>(
      std::count_if(complex.flags.begin(), complex.flags.end(),
                    [](const FlaggedCell& f) { return f.kind == CellFlag::ambiguous; }));
  const bool pass = r.wrong_dimension_cells == 0 && r.isolated_vertices == 0 &&
                    r.ambiguous_cells == 0 && r.tie_area_fraction == 0.0;
  r.verdict = pass ? "PASS" : "FAIL";
  if (pass && complex.empty()) r.warning = "empty conflict window; check passes vacuously";
  return r;
}

ConflictComplex make_transversal_planes_complex(double half, int cells) {
  if (cells < 2 || cells % 2 != 0) throw Error("plane grid needs an even cell count");
  std::vector<Point> verts;
  std::vector<Cell> tris;
  std::map<int, int> axis;  // shared vertices on the x2 axis, by grid row
  const double step = 2.0 * half / cells;
  const Point ey(0, 1, 0);
  for (const Point& es : {Point(1, 0, 1).normalized(), Point(1, 0, -1).normalized()}) {
    std::vector<int> id((cells + 1) * (cells + 1));
    for (int i = 0; i <= cells; ++i) {
      for (int j = 0; j <= cells; ++j) {
        const double s = -half + step * i;
        const double y = -half + step * j;
        if (2 * i == cells) {
          auto [it, inserted] = axis.try_emplace(j, static_cast<int>(verts.size()));
          if (inserted) verts.push_back(y * ey);
          id[i * (cells + 1) + j] = it->second;
        } else {
          id[i * (cells + 1) + j] = static_cast<int>(verts.size());
          verts.push_back(s * es + y * ey);
        }
      }
    }
    for (int i = 0; i < cells; ++i) {
      for (int j = 0; j < cells; ++j) {
        const int a = id[i * (cells + 1) + j], b = id[(i + 1) * (cells + 1) + j];
        const int c = id[(i + 1) * (cells + 1) + j + 1], d = id[i * (cells + 1) + j + 1];
        tris.push_back(Cell{{a, b, c}, SitePair{0, 1}});
        tris.push_back(Cell{{a, c, d}, SitePair{0, 1}});
      }
    }
  }
  ConflictComplex c = make_complex(3, std::move(verts), std::move(tris), step);
  return c;
}

ConflictComplex make_tangent_circles_complex(int segments) {
  if (segments < 8) throw Error("circle needs at least 8 segments");
  std::vector<Point> verts{Point::Zero()};
  std::vector<Cell> edges;
  for (const double side : {1.0, -1.0}) {
    int prev = 0;
    for (int k = 1; k < segments; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / segments;
      verts.push_back(Point(side * (1.0 - std::cos(phi)), std::sin(phi), 0.0));
      const int cur = static_cast<int>(verts.size()) - 1;
      edges.push_back(Cell{{prev, cur, -1}, SitePair{0, 1}});
      prev = cur;
    }
    edges.push_back(Cell{{prev, 0, -1}, SitePair{0, 1}});
  }
  const double chord = 2.0 * std::sin(std::numbers::pi / segments);
  return make_complex(2, std::move(verts), std::move(edges), chord);
}

}  // namespace conflict
