#include "conflict/conflict.hpp"

#include "conflict/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

namespace conflict {

bool TerritoryLabel::contains(int i) const {
  return std::binary_search(argmin.begin(), argmin.end(), i);
}

std::vector<double> site_distances(const Scene& scene, const Point& x) {
  std::vector<double> d(scene.size());
  for (std::size_t i = 0; i < scene.size(); ++i) d[i] = distance(scene.site(i), x, scene.metric());
  return d;
}

namespace {

TerritoryLabel label_from_distances(const double* d, std::size_t k, double tie_tol) {
  TerritoryLabel out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) best = std::min(best, d[i]);
  double second = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    if (d[i] <= best + tie_tol) {
      out.argmin.push_back(static_cast<int>(i));
    }
  }
  // margin: gap to the nearest competitor; zero for ties
  bool seen_best = false;
  for (std::size_t i = 0; i < k; ++i) {
    if (d[i] == best && !seen_best) {
      seen_best = true;
      continue;
    }
    second = std::min(second, d[i]);
  }
  out.min_distance = best;
  out.margin = out.argmin.size() >= 2 ? 0.0 : second - best;
  return out;
}

// Index of the smallest distance; lowest index on exact ties.
int primary_label(const double* d, std::size_t k) {
  int best = 0;
  for (std::size_t i = 1; i < k; ++i) {
    if (d[i] < d[best]) best = static_cast<int>(i);
  }
  return best;
}

bool is_tie(const double* d, std::size_t k, double tie_tol) {
  int count = 0;
  const double best = d[primary_label(d, k)];
  for (std::size_t i = 0; i < k; ++i) count += d[i] <= best + tie_tol;
  return count >= 2;
}

}  // namespace

TerritoryLabel label(const Scene& scene, const Point& x, double tie_tol) {
  const auto d = site_distances(scene, x);
  return label_from_distances(d.data(), d.size(), tie_tol);
}

Point refine_point(const Scene& scene, const Point& a, const Point& b, SitePair pair, double tol,
                   int max_iter) {
  const auto f = [&](const Point& x) {
    return distance(scene.site(pair.i), x, scene.metric()) -
           distance(scene.site(pair.j), x, scene.metric());
  };
  const double fa = f(a), fb = f(b);
  if ((fa <= 0.0) == (fb <= 0.0)) {
    throw Error("refine_point: no sign change of the distance difference on the bracket");
  }
  if (std::abs(fa) <= tol) return a;
  if (std::abs(fb) <= tol) return b;
  Point lo = a, hi = b;
  const bool lo_side = fa <= 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Point mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) <= tol) return mid;
    if ((fm <= 0.0) == lo_side) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Window window_around(const Point& center, double half, int dimension) {
  Window w;
  for (int k = 0; k < dimension; ++k) {
    w.lo[k] = center[k] - half;
    w.hi[k] = center[k] + half;
  }
  return w;
}

Window parse_window(const std::vector<double>& values, int dimension) {
  if (static_cast<int>(values.size()) != 2 * dimension) {
    throw Error("window needs " + std::to_string(2 * dimension) + " values (min,max per axis)");
  }
  Window w;
  for (int k = 0; k < dimension; ++k) {
    w.lo[k] = values[2 * k];
    w.hi[k] = values[2 * k + 1];
    if (!(w.lo[k] < w.hi[k])) throw Error("window must satisfy min < max on every axis");
  }
  return w;
}

void compute_adjacency(ConflictComplex& c) {
  c.adjacency.assign(c.cells.size(), {});
  if (c.cells.empty()) return;
  if (c.cells.front().arity() == 2) {
    std::vector<std::vector<int>> by_vertex(c.vertices.size());
    for (std::size_t ci = 0; ci < c.cells.size(); ++ci) {
      for (int s = 0; s < 2; ++s) by_vertex[c.cells[ci].v[s]].push_back(static_cast<int>(ci));
    }
    for (const auto& list : by_vertex) {
      for (int a : list) {
        for (int b : list) {
          if (a != b) c.adjacency[a].push_back(b);
        }
      }
    }
  } else {
    std::map<std::pair<int, int>, std::vector<int>> by_edge;
    for (std::size_t ci = 0; ci < c.cells.size(); ++ci) {
      const auto& v = c.cells[ci].v;
      for (int s = 0; s < 3; ++s) {
        const int a = v[s], b = v[(s + 1) % 3];
        by_edge[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(ci));
      }
    }
    for (const auto& [edge, list] : by_edge) {
      for (int a : list) {
        for (int b : list) {
          if (a != b) c.adjacency[a].push_back(b);
        }
      }
    }
  }
  for (auto& list : c.adjacency) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

ConflictComplex make_complex(int dimension, std::vector<Point> vertices, std::vector<Cell> cells,
                             double spacing) {
  ConflictComplex c;
  c.dimension = dimension;
  c.residuals.assign(vertices.size(), 0.0);
  c.vertices = std::move(vertices);
  c.cells = std::move(cells);
  c.spacing = spacing;
  compute_adjacency(c);
  return c;
}

// ---------------------------------------------------------------------------
// Grid extraction.

namespace {

constexpr double kSnapTolerance = 1e-12;

// Vertex keys: lattice points, lattice edges and per-cell junctions live in disjoint ranges.
constexpr std::uint64_t kEdgeTag = 1ull << 62;
constexpr std::uint64_t kJunctionTag = 1ull << 63;

struct Lattice {
  Window window;
  int n = 0;    // cells per axis
  int dim = 2;

  // Doubled-lattice coordinate a in [0, 2n].
  Point at(int a, int b, int c) const {
    Point p = Point::Zero();
    const int idx[3] = {a, b, c};
    for (int k = 0; k < dim; ++k) {
      p[k] = window.lo[k] + (window.hi[k] - window.lo[k]) * idx[k] / (2.0 * n);
    }
    return p;
  }
  std::uint64_t key(int a, int b, int c) const {
    const std::uint64_t m = 2ull * n + 1;
    return static_cast<std::uint64_t>(a) + m * (static_cast<std::uint64_t>(b) + m * c);
  }
  std::uint64_t points() const {
    const std::uint64_t m = 2ull * n + 1;
    return dim == 2 ? m * m : m * m * m;
  }
  double spacing() const {
    double h = 0.0;
    for (int k = 0; k < dim; ++k) h = std::max(h, (window.hi[k] - window.lo[k]) / n);
    return h;
  }
};

struct Corner {
  Point p;
  std::uint64_t key = 0;
  const double* d = nullptr;
  int primary = 0;
  bool tie = false;
};

struct VertexRec {
  std::uint64_t key = 0;
  Point p;
  double residual = 0.0;
};

struct OutCell {
  std::array<VertexRec, 3> v;
  int arity = 2;
  SitePair pair;
};

struct CellOutput {
  std::vector<OutCell> cells;
  std::vector<FlaggedCell> flags;
};

struct Crossing {
  VertexRec vertex;
  bool kept = false;
};

class Extractor {
 public:
  Extractor(const Scene& scene, const Lattice& lattice, double tie_tol)
      : scene_(scene), lat_(lattice), k_(scene.size()), tie_tol_(tie_tol) {}

  double f(const Point& x, SitePair pr) const {
    return distance(scene_.site(pr.i), x, scene_.metric()) -
           distance(scene_.site(pr.j), x, scene_.metric());
  }

  bool minimal(const Point& x, SitePair pr) const {
    const auto lab = label(scene_, x, kMinimalityTolerance);
    return lab.contains(pr.i) && lab.contains(pr.j);
  }

  // Root of d_i - d_j on the lattice edge (a, b); classes are f <= 0 and f > 0.
  Crossing crossing(const Corner& a0, const Corner& b0, SitePair pr) const {
    const bool swap = b0.key < a0.key;
    const Corner& a = swap ? b0 : a0;
    const Corner& b = swap ? a0 : b0;
    const double fa = a.d[pr.i] - a.d[pr.j];
    const double fb = b.d[pr.i] - b.d[pr.j];
    Crossing out;
    if (std::abs(fa) <= kSnapTolerance || std::abs(fb) <= kSnapTolerance) {
      const Corner& c = std::abs(fa) <= std::abs(fb) ? a : b;
      out.vertex = {c.key, c.p, std::abs(c.d[pr.i] - c.d[pr.j])};
    } else {
      double t0 = 0.0, t1 = 1.0;
      const bool side = fa <= 0.0;
      const Point ab = b.p - a.p;
      Point root;
      bool exact = false;
      for (int it = 0; it < kMaxEdgeBisections; ++it) {
        const double tm = 0.5 * (t0 + t1);
        const Point xm = a.p + tm * ab;
        const double fm = f(xm, pr);
        if (fm == 0.0) {
          root = xm;
          exact = true;
          break;
        }
        if ((fm <= 0.0) == side) {
          t0 = tm;
        } else {
          t1 = tm;
        }
        if (t1 - t0 < 1e-17) break;
      }
      if (!exact) root = a.p + (0.5 * (t0 + t1)) * ab;
      out.vertex = {kEdgeTag | (a.key * lat_.points() + b.key), root, std::abs(f(root, pr))};
    }
    out.kept = out.vertex.residual <= kResidualTolerance && minimal(out.vertex.p, pr);
    return out;
  }

  Corner make_corner(int a, int b, int c, std::vector<double>& store, std::size_t slot) const {
    Corner out;
    out.p = lat_.at(a, b, c);
    out.key = lat_.key(a, b, c);
    double* d = store.data() + slot * k_;
    for (std::size_t s = 0; s < k_; ++s) d[s] = distance(scene_.site(s), out.p, scene_.metric());
    out.d = d;
    out.primary = primary_label(d, k_);
    out.tie = is_tie(d, k_, tie_tol_);
    return out;
  }

  // Solves for a point equidistant to three sites inside [lo, hi] (2D).
  std::optional<VertexRec> junction(const std::array<int, 3>& t, const Point& lo, const Point& hi,
                                    double h) const {
    Eigen::Vector2d x(0.5 * (lo.x() + hi.x()), 0.5 * (lo.y() + hi.y()));
    const auto F = [&](const Eigen::Vector2d& q) {
      const Point p(q.x(), q.y(), 0.0);
      const double di = distance(scene_.site(t[0]), p, scene_.metric());
      return Eigen::Vector2d(di - distance(scene_.site(t[1]), p, scene_.metric()),
                             di - distance(scene_.site(t[2]), p, scene_.metric()));
    };
    const double step = 1e-7 * h;
    for (int it = 0; it < 60; ++it) {
      const Eigen::Vector2d Fx = F(x);
      if (Fx.lpNorm<Eigen::Infinity>() <= 1e-13) break;
      Eigen::Matrix2d J;
      for (int c = 0; c < 2; ++c) {
        Eigen::Vector2d e = Eigen::Vector2d::Zero();
        e[c] = step;
        J.col(c) = (F(x + e) - F(x - e)) / (2.0 * step);
      }
      if (std::abs(J.determinant()) < 1e-14) return std::nullopt;
      Eigen::Vector2d dx = J.partialPivLu().solve(Fx);
      if (dx.norm() > 2.0 * h) dx *= 2.0 * h / dx.norm();
      x -= dx;
    }
    const double margin = 1e-9 * h;
    if (x.x() < lo.x() - margin || x.x() > hi.x() + margin || x.y() < lo.y() - margin ||
        x.y() > hi.y() + margin) {
      return std::nullopt;
    }
    Point p(x.x(), x.y(), 0.0);
    const auto d = site_distances(scene_, p);
    const double res = std::max({std::abs(d[t[0]] - d[t[1]]), std::abs(d[t[0]] - d[t[2]]),
                                 std::abs(d[t[1]] - d[t[2]])});
    if (res > kResidualTolerance) return std::nullopt;
    const auto lab = label_from_distances(d.data(), d.size(), kMinimalityTolerance);
    if (!lab.contains(t[0]) || !lab.contains(t[1]) || !lab.contains(t[2])) return std::nullopt;
    return VertexRec{0, p, res};
  }

  const Scene& scene_;
  const Lattice& lat_;
  std::size_t k_;
  double tie_tol_;
};

struct BaseLabels {
  std::vector<double> dist;
  std::vector<int> primary;
  std::vector<unsigned char> tie;
};

BaseLabels label_lattice(const Scene& scene, const Lattice& lat, int workers, double tie_tol) {
  const std::size_t m = static_cast<std::size_t>(lat.n) + 1;
  const std::size_t total = lat.dim == 2 ? m * m : m * m * m;
  const std::size_t k = scene.size();
  BaseLabels out;
  out.dist.resize(total * k);
  out.primary.resize(total);
  out.tie.resize(total);
  parallel_for(total, workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t v = b; v < e; ++v) {
      const int i = static_cast<int>(v % m);
      const int j = static_cast<int>((v / m) % m);
      const int l = static_cast<int>(v / (m * m));
      const Point p = lat.at(2 * i, 2 * j, 2 * l);
      double* d = out.dist.data() + v * k;
      for (std::size_t s = 0; s < k; ++s) d[s] = distance(scene.site(s), p, scene.metric());
      out.primary[v] = primary_label(d, k);
      out.tie[v] = is_tie(d, k, tie_tol);
    }
  });
  return out;
}

ConflictComplex assemble(int dim, const Lattice& lat, std::vector<CellOutput>& outputs,
                         Metric metric) {
  ConflictComplex c;
  c.dimension = dim;
  c.window = lat.window;
  c.resolution = lat.n;
  c.spacing = lat.spacing();
  c.metric = metric;
  std::unordered_map<std::uint64_t, int> ids;
  std::set<std::array<int, 4>> seen;
  for (auto& out : outputs) {
    for (auto& f : out.flags) c.flags.push_back(f);
    for (const auto& oc : out.cells) {
      std::array<std::uint64_t, 3> keys{oc.v[0].key, oc.v[1].key, oc.v[2].key};
      if (keys[0] == keys[1] || (oc.arity == 3 && (keys[1] == keys[2] || keys[0] == keys[2]))) {
        continue;
      }
      std::array<int, 3> v{-1, -1, -1};
      for (int s = 0; s < oc.arity; ++s) {
        const auto& rec = oc.v[s];
        auto [it, inserted] = ids.try_emplace(rec.key, static_cast<int>(c.vertices.size()));
        if (inserted) {
          c.vertices.push_back(rec.p);
          c.residuals.push_back(rec.residual);
        } else {
          c.residuals[it->second] = std::max(c.residuals[it->second], rec.residual);
        }
        v[s] = it->second;
      }
      std::array<int, 4> sorted{v[0], v[1], v[2], 0};
      std::sort(sorted.begin(), sorted.begin() + oc.arity);
      if (!seen.insert(sorted).second) continue;
      c.cells.push_back(Cell{v, oc.pair});
    }
  }
  compute_adjacency(c);
  return c;
}

void check_window(const Window& w, int dim, int resolution) {
  for (int k = 0; k < dim; ++k) {
    if (!(w.lo[k] < w.hi[k])) throw Error("extraction window is empty");
  }
  if (resolution < 8) throw Error("resolution must be at least 8");
  if (resolution > 512) throw Error("resolution must be at most 512");
}

// ---- 2D -------------------------------------------------------------------

void extract_cell_2d(const Extractor& ex, const Lattice& lat, const BaseLabels& base, int i,
                     int j, CellOutput& out) {
  const std::size_t m = static_cast<std::size_t>(lat.n) + 1;
  const std::size_t k = ex.k_;
  std::array<Corner, 4> c;
  const int off[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  bool all_tie = true;
  std::set<int> labels;
  for (int s = 0; s < 4; ++s) {
    const int a = i + off[s][0], b = j + off[s][1];
    const std::size_t v = static_cast<std::size_t>(a) + m * b;
    c[s].p = lat.at(2 * a, 2 * b, 0);
    c[s].key = lat.key(2 * a, 2 * b, 0);
    c[s].d = base.dist.data() + v * k;
    c[s].primary = base.primary[v];
    c[s].tie = base.tie[v];
    all_tie = all_tie && c[s].tie;
    labels.insert(c[s].primary);
  }
  if (all_tie) {
    out.flags.push_back({{i, j, 0}, CellFlag::ambiguous});
    return;
  }
  if (labels.size() < 2) return;

  std::array<std::optional<Crossing>, 4> cross;
  std::array<SitePair, 4> pairs;
  for (int e = 0; e < 4; ++e) {
    const Corner& a = c[e];
    const Corner& b = c[(e + 1) % 4];
    if (a.primary == b.primary) continue;
    pairs[e] = SitePair::of(a.primary, b.primary);
    cross[e] = ex.crossing(a, b, pairs[e]);
  }
  const auto emit = [&](int e0, int e1) {
    if (!cross[e0] || !cross[e1] || !cross[e0]->kept || !cross[e1]->kept) return;
    OutCell oc;
    oc.arity = 2;
    oc.pair = pairs[e0];
    oc.v[0] = cross[e0]->vertex;
    oc.v[1] = cross[e1]->vertex;
    out.cells.push_back(oc);
  };

  if (labels.size() == 2) {
    std::vector<int> edges;
    for (int e = 0; e < 4; ++e) {
      if (cross[e]) edges.push_back(e);
    }
    if (edges.size() == 2) {
      emit(edges[0], edges[1]);
    } else if (edges.size() == 4) {
      const SitePair pr = pairs[0];
      const Point center = 0.5 * (c[0].p + c[2].p);
      const bool center_side = ex.f(center, pr) <= 0.0;
      const bool c0_side = (c[0].d[pr.i] - c[0].d[pr.j]) <= 0.0;
      if (center_side == c0_side) {
        emit(0, 1);
        emit(2, 3);
      } else {
        emit(3, 0);
        emit(1, 2);
      }
    }
    return;
  }

  // Three or more labels: locate a junction vertex and fan the crossings into it.
  out.flags.push_back({{i, j, 0}, CellFlag::junction});
  const std::vector<int> lab(labels.begin(), labels.end());
  const double h = lat.spacing();
  std::optional<VertexRec> jv;
  if (ex.scene_.metric() == Metric::euclidean) {
    for (std::size_t a = 0; a < lab.size() && !jv; ++a) {
      for (std::size_t b = a + 1; b < lab.size() && !jv; ++b) {
        for (std::size_t d = b + 1; d < lab.size() && !jv; ++d) {
          jv = ex.junction({lab[a], lab[b], lab[d]}, c[0].p, c[2].p, h);
        }
      }
    }
  }
  if (jv) {
    jv->key = kJunctionTag | (static_cast<std::uint64_t>(i) + m * j);
    for (int s = 0; s < 4; ++s) {
      if ((jv->p - c[s].p).norm() <= 1e-9 * h) {
        jv->key = c[s].key;
        jv->p = c[s].p;
      }
    }
    for (int e = 0; e < 4; ++e) {
      if (!cross[e] || !cross[e]->kept) continue;
      OutCell oc;
      oc.arity = 2;
      oc.pair = pairs[e];
      oc.v[0] = cross[e]->vertex;
      oc.v[1] = *jv;
      out.cells.push_back(oc);
    }
    return;
  }
  for (int e0 = 0; e0 < 4; ++e0) {
    for (int e1 = e0 + 1; e1 < 4; ++e1) {
      if (cross[e0] && cross[e1] && pairs[e0] == pairs[e1]) emit(e0, e1);
    }
  }
}

// ---- 3D -------------------------------------------------------------------

// Freudenthal decomposition: six tetrahedra sharing the main diagonal.
constexpr int kTets[6][4] = {{0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7},
                             {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}};

void march_tets(const Extractor& ex, const std::array<Corner, 8>& c, SitePair pr,
                CellOutput& out) {
  std::vector<std::pair<std::pair<int, int>, Crossing>> memo;
  const auto cross = [&](int a, int b) -> const Crossing& {
    const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
    for (const auto& [k, v] : memo) {
      if (k == key) return v;
    }
    memo.emplace_back(key, ex.crossing(c[a], c[b], pr));
    return memo.back().second;
  };
  const auto emit = [&](std::vector<const Crossing*> poly) {
    for (const auto* x : poly) {
      if (!x->kept) return;
    }
    std::vector<VertexRec> uniq;
    for (const auto* x : poly) {
      bool dup = false;
      for (const auto& u : uniq) dup = dup || u.key == x->vertex.key;
      if (!dup) uniq.push_back(x->vertex);
    }
    if (uniq.size() < 3) return;
    for (std::size_t t = 1; t + 1 < uniq.size(); ++t) {
      OutCell oc;
      oc.arity = 3;
      oc.pair = pr;
      oc.v = {uniq[0], uniq[t], uniq[t + 1]};
      out.cells.push_back(oc);
    }
  };
  for (const auto& tet : kTets) {
    std::array<int, 4> in{}, outv{};
    int nin = 0, nout = 0;
    for (int s = 0; s < 4; ++s) {
      const Corner& q = c[tet[s]];
      if (q.d[pr.i] - q.d[pr.j] <= 0.0) {
        in[nin++] = tet[s];
      } else {
        outv[nout++] = tet[s];
      }
    }
    if (nin == 0 || nout == 0) continue;
    // memo entries are stable only until the next insertion; copy before emitting
    if (nin == 1 || nout == 1) {
      const int lone = nin == 1 ? in[0] : outv[0];
      const auto& others = nin == 1 ? outv : in;
      const Crossing x0 = cross(lone, others[0]);
      const Crossing x1 = cross(lone, others[1]);
      const Crossing x2 = cross(lone, others[2]);
      emit({&x0, &x1, &x2});
    } else {
      const Crossing x0 = cross(in[0], outv[0]);
      const Crossing x1 = cross(in[0], outv[1]);
      const Crossing x2 = cross(in[1], outv[1]);
      const Crossing x3 = cross(in[1], outv[0]);
      emit({&x0, &x1, &x2, &x3});
    }
  }
}

void extract_cube_3d(const Extractor& ex, const Lattice& lat, const BaseLabels& base, int i,
                     int j, int l, CellOutput& out) {
  const std::size_t m = static_cast<std::size_t>(lat.n) + 1;
  const std::size_t k = ex.k_;
  std::array<Corner, 8> c;
  bool all_tie = true;
  std::set<int> labels;
  for (int s = 0; s < 8; ++s) {
    const int a = i + (s & 1), b = j + (s >> 1 & 1), d = l + (s >> 2 & 1);
    const std::size_t v = static_cast<std::size_t>(a) + m * (b + m * d);
    c[s].p = lat.at(2 * a, 2 * b, 2 * d);
    c[s].key = lat.key(2 * a, 2 * b, 2 * d);
    c[s].d = base.dist.data() + v * k;
    c[s].primary = base.primary[v];
    c[s].tie = base.tie[v];
    all_tie = all_tie && c[s].tie;
    labels.insert(c[s].primary);
  }
  if (all_tie) {
    out.flags.push_back({{i, j, l}, CellFlag::ambiguous});
    return;
  }
  if (labels.size() < 2) return;
  if (labels.size() == 2) {
    march_tets(ex, c, SitePair::of(*labels.begin(), *labels.rbegin()), out);
    return;
  }

  // One level of subdivision on the doubled lattice.
  out.flags.push_back({{i, j, l}, CellFlag::junction});
  std::vector<double> store(27 * k);
  std::array<Corner, 27> sub;
  for (int s = 0; s < 27; ++s) {
    const int a = s % 3, b = s / 3 % 3, d = s / 9;
    sub[s] = ex.make_corner(2 * i + a, 2 * j + b, 2 * l + d, store, s);
  }
  for (int sc = 0; sc < 8; ++sc) {
    const int oa = sc & 1, ob = sc >> 1 & 1, od = sc >> 2 & 1;
    std::array<Corner, 8> cc;
    std::set<int> sl;
    for (int s = 0; s < 8; ++s) {
      const int a = oa + (s & 1), b = ob + (s >> 1 & 1), d = od + (s >> 2 & 1);
      cc[s] = sub[a + 3 * b + 9 * d];
      sl.insert(cc[s].primary);
    }
    if (sl.size() < 2) continue;
    const std::vector<int> lab(sl.begin(), sl.end());
    for (std::size_t a = 0; a < lab.size(); ++a) {
      for (std::size_t b = a + 1; b < lab.size(); ++b) {
        march_tets(ex, cc, SitePair{lab[a], lab[b]}, out);
      }
    }
  }
}

}  // namespace

ConflictComplex extract_conflict_2d(const Scene& scene, const Window& window,
                                    const ExtractOptions& options) {
  if (scene.dimension() != 2) throw Error("extract_conflict_2d requires a 2D scene");
  check_window(window, 2, options.resolution);
  Lattice lat{window, options.resolution, 2};
  const BaseLabels base = label_lattice(scene, lat, options.workers, options.tie_tol);
  Extractor ex(scene, lat, options.tie_tol);
  const int n = lat.n;
  std::vector<CellOutput> outputs(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), options.workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) {
      for (int i = 0; i < n; ++i) {
        extract_cell_2d(ex, lat, base, i, static_cast<int>(j), outputs[j]);
      }
    }
  });
  ConflictComplex c = assemble(2, lat, outputs, scene.metric());
  std::size_t ambiguous = 0;
  for (const auto& f : c.flags) ambiguous += f.kind == CellFlag::ambiguous;
  c.tie_area_fraction = static_cast<double>(ambiguous) / (static_cast<double>(n) * n);
  return c;
}

ConflictComplex extract_conflict_3d(const Scene& scene, const Window& window,
                                    const ExtractOptions& options) {
  if (scene.dimension() != 3) throw Error("extract_conflict_3d requires a 3D scene");
  if (scene.metric() != Metric::euclidean) {
    throw Error("3D extraction supports the Euclidean metric only");
  }
  check_window(window, 3, options.resolution);
  Lattice lat{window, options.resolution, 3};
  const BaseLabels base = label_lattice(scene, lat, options.workers, options.tie_tol);
  Extractor ex(scene, lat, options.tie_tol);
  const std::size_t n = static_cast<std::size_t>(lat.n);
  std::vector<CellOutput> outputs(n);
  parallel_for(n, options.workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t l = b; l < e; ++l) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
          extract_cube_3d(ex, lat, base, static_cast<int>(i), static_cast<int>(j),
                          static_cast<int>(l), outputs[l]);
        }
      }
    }
  });
  ConflictComplex c = assemble(3, lat, outputs, scene.metric());
  std::size_t ambiguous = 0;
  for (const auto& f : c.flags) ambiguous += f.kind == CellFlag::ambiguous;
  c.tie_area_fraction = static_cast<double>(ambiguous) / static_cast<double>(n * n * n);
  return c;
}

ConflictComplex extract_conflict(const Scene& scene, const Window& window,
                                 const ExtractOptions& options) {
  return scene.dimension() == 2 ? extract_conflict_2d(scene, window, options)
                                : extract_conflict_3d(scene, window, options);
}

}  // namespace conflict
