#include "conflict/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace conflict {

namespace {

// Shortest round-trip representation, so output is stable across runs.
std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

const char* flag_name(CellFlag f) { return f == CellFlag::ambiguous ? "ambiguous" : "junction"; }

}  // namespace

std::vector<Polyline> chain_polylines(const ConflictComplex& complex) {
  std::map<SitePair, std::vector<int>> by_pair;
  for (std::size_t c = 0; c < complex.cells.size(); ++c) {
    if (complex.cells[c].arity() == 2) by_pair[complex.cells[c].pair].push_back(static_cast<int>(c));
  }
  std::vector<Polyline> out;
  for (const auto& [pair, edges] : by_pair) {
    std::map<int, std::vector<int>> incident;
    for (int e : edges) {
      incident[complex.cells[e].v[0]].push_back(e);
      incident[complex.cells[e].v[1]].push_back(e);
    }
    std::set<int> used;
    const auto other = [&](int e, int v) {
      const auto& c = complex.cells[e];
      return c.v[0] == v ? c.v[1] : c.v[0];
    };
    const auto walk = [&](int start, int first_edge) {
      Polyline line{pair, {start}};
      int v = start, e = first_edge;
      while (true) {
        used.insert(e);
        v = other(e, v);
        line.vertices.push_back(v);
        const auto& inc = incident[v];
        if (inc.size() != 2) break;
        const int next = inc[0] == e ? inc[1] : inc[0];
        if (used.count(next)) break;
        e = next;
      }
      out.push_back(std::move(line));
    };
    // Open chains start at endpoints and branch points, then the remaining cycles.
    for (const auto& [v, inc] : incident) {
      if (inc.size() == 2) continue;
      for (int e : inc) {
        if (!used.count(e)) walk(v, e);
      }
    }
    for (int e : edges) {
      if (!used.count(e)) walk(complex.cells[e].v[0], e);
    }
  }
  return out;
}

void write_complex_csv(const ConflictComplex& complex, std::ostream& out) {
  out << "vx,vy,residual,pair_i,pair_j,polyline_id\n";
  const auto lines = chain_polylines(complex);
  for (std::size_t id = 0; id < lines.size(); ++id) {
    for (int v : lines[id].vertices) {
      const Point& p = complex.vertices[v];
      out << num(p[0]) << ',' << num(p[1]) << ',' << num(complex.residuals[v]) << ','
          << lines[id].pair.i << ',' << lines[id].pair.j << ',' << id << '\n';
    }
  }
}

void write_complex_obj(const ConflictComplex& complex, std::ostream& out) {
  out << "# conflict complex: " << complex.vertices.size() << " vertices, " << complex.cells.size()
      << " cells\n";
  for (const auto& p : complex.vertices) {
    out << "v " << num(p[0]) << ' ' << num(p[1]) << ' ' << num(p[2]) << '\n';
  }
  std::map<SitePair, std::vector<int>> groups;
  for (std::size_t c = 0; c < complex.cells.size(); ++c) {
    groups[complex.cells[c].pair].push_back(static_cast<int>(c));
  }
  for (const auto& [pair, cells] : groups) {
    out << "g pair_" << pair.i << '_' << pair.j << '\n';
    for (int c : cells) {
      const auto& cell = complex.cells[c];
      if (cell.arity() == 3) {
        out << "f " << cell.v[0] + 1 << ' ' << cell.v[1] + 1 << ' ' << cell.v[2] + 1 << '\n';
      } else {
        out << "l " << cell.v[0] + 1 << ' ' << cell.v[1] + 1 << '\n';
      }
    }
  }
}

json complex_sidecar(const ConflictComplex& complex) {
  json j;
  j["dimension"] = complex.dimension;
  j["metric"] = complex.metric == Metric::euclidean ? "euclidean" : "taxicab";
  j["resolution"] = complex.resolution;
  j["spacing"] = complex.spacing;
  json lo = json::array(), hi = json::array();
  for (int k = 0; k < complex.dimension; ++k) {
    lo.push_back(complex.window.lo[k]);
    hi.push_back(complex.window.hi[k]);
  }
  j["window"] = {{"min", lo}, {"max", hi}};
  j["vertices"] = complex.vertices.size();
  j["cells"] = complex.cells.size();
  double worst = 0.0;
  for (double r : complex.residuals) worst = std::max(worst, r);
  j["max_residual"] = worst;
  j["tie_area_fraction"] = complex.tie_area_fraction;
  std::map<SitePair, int> per_pair;
  for (const auto& c : complex.cells) ++per_pair[c.pair];
  json pairs = json::array();
  for (const auto& [p, n] : per_pair) pairs.push_back({{"pair", {p.i, p.j}}, {"cells", n}});
  j["pairs"] = pairs;
  json flags = json::array();
  for (const auto& f : complex.flags) {
    json idx = json::array();
    for (int k = 0; k < complex.dimension; ++k) idx.push_back(f.grid_index[k]);
    flags.push_back({{"cell", idx}, {"kind", flag_name(f.kind)}});
  }
  j["flags"] = flags;
  j["residuals"] = numbers(complex.residuals);
  return j;
}

void write_spherical_csv(const SphericalComplex& s, std::ostream& out) {
  out << "ux,uy,uz,residual,pair_i,pair_j\n";
  for (std::size_t v = 0; v < s.vertices.size(); ++v) {
    const Point& u = s.vertices[v];
    out << num(u[0]) << ',' << num(u[1]) << ',' << num(u[2]) << ',' << num(s.residuals[v]) << ','
        << s.vertex_pairs[v].i << ',' << s.vertex_pairs[v].j << '\n';
  }
}

void write_spherical_obj(const SphericalComplex& s, std::ostream& out) {
  out << "# spherical conflict set: " << s.vertices.size() << " vertices, " << s.arcs.size()
      << " arcs\n";
  for (const auto& u : s.vertices) out << "v " << num(u[0]) << ' ' << num(u[1]) << ' ' << num(u[2]) << '\n';
  std::map<SitePair, std::vector<int>> groups;
  for (std::size_t a = 0; a < s.arcs.size(); ++a) groups[s.arc_pairs[a]].push_back(static_cast<int>(a));
  for (const auto& [pair, arcs] : groups) {
    out << "g pair_" << pair.i << '_' << pair.j << '\n';
    for (int a : arcs) out << "l " << s.arcs[a][0] + 1 << ' ' << s.arcs[a][1] + 1 << '\n';
  }
}

json to_json(const Point& p, int dimension) {
  json a = json::array();
  for (int k = 0; k < dimension; ++k) a.push_back(number(p[k]));
  return a;
}

json to_json(const SupportSet& support) {
  json j;
  j["x0"] = to_json(support.x0, support.dimension);
  j["r0"] = support.r0;
  json sites = json::array();
  for (const auto& s : support.sites) {
    json dirs = json::array();
    for (const auto& u : s.points) dirs.push_back(to_json(u, support.dimension));
    sites.push_back({{"site", s.site},
                     {"id", s.id},
                     {"empty", s.empty()},
                     {"whole_sphere", s.whole_sphere},
                     {"directions", dirs}});
  }
  j["sites"] = sites;
  j["excluded"] = support.excluded();
  return j;
}

json to_json(const SphericalComplex& s) {
  json j;
  j["dimension"] = s.dimension;
  j["vertices"] = s.vertices.size();
  j["arcs"] = s.arcs.size();
  double worst = 0.0;
  for (double r : s.residuals) worst = std::max(worst, r);
  j["max_residual"] = worst;
  std::set<SitePair> pairs(s.vertex_pairs.begin(), s.vertex_pairs.end());
  json p = json::array();
  for (const auto& sp : pairs) p.push_back({sp.i, sp.j});
  j["pairs"] = p;
  if (s.dimension == 2) {
    json pts = json::array();
    for (const auto& u : s.vertices) pts.push_back(to_json(u, 2));
    j["points"] = pts;
  }
  return j;
}

json to_json(const TangentReport& r, int dimension) {
  json j;
  j["x0"] = to_json(r.x0, dimension);
  j["eps"] = r.eps;
  j["d_to_spherical"] = numbers(r.d_to_spherical);
  j["d_successive"] = numbers(r.d_successive);
  j["verdict"] = r.verdict;
  j["monotone"] = r.monotone;
  j["final_within_tol"] = r.final_within;
  j["accept_tol"] = r.accept_tol;
  j["r0"] = r.r0;
  j["achieving"] = r.achieving;
  j["excluded_supports"] = r.excluded_supports;
  j["resolution"] = r.resolution;
  j["spacing"] = r.spacing;
  j["territory"] = {{"samples", r.territory.samples},
                    {"compared", r.territory.compared},
                    {"agreement", r.territory.agreement},
                    {"probe_radius", r.territory.probe_radius},
                    {"pass", r.territory_pass},
                    {"cap_samples", r.territory.cap_samples},
                    {"cap_radius", r.territory.cap_radius},
                    {"sites", r.territory.sites},
                    {"interior_fraction", numbers(r.territory.interior_fraction)}};
  return j;
}

json to_json(const EmbeddingReport& r) {
  json j;
  j["x0"] = to_json(r.x0, 3);
  json scales = json::array();
  for (const auto& s : r.scales) {
    json pairs = json::array();
    for (const auto& p : s.pairs) {
      pairs.push_back({{"p", to_json(p.p, 3)},
                       {"q", to_json(p.q, 3)},
                       {"inner", number(p.inner)},
                       {"outer", number(p.outer)},
                       {"ratio", number(p.ratio)}});
    }
    scales.push_back({{"theta", s.theta},
                      {"radius", s.radius},
                      {"link_components", s.link_components},
                      {"candidates", s.candidates},
                      {"ratio", number(s.ratio)},
                      {"pairs", pairs}});
  }
  j["scales"] = scales;
  j["growth"] = numbers(r.growth);
  j["verdict"] = r.verdict;
  return j;
}

json to_json(const NoCuspReport& r) {
  json j;
  j["y0"] = to_json(r.y0, 2);
  j["eps"] = r.eps;
  json dirs = json::array();
  for (const auto& u : r.branches.directions) dirs.push_back(to_json(u, 2));
  j["directions"] = dirs;
  j["cluster_sizes"] = r.branches.sizes;
  j["cluster_counts"] = r.branches.counts;
  j["angles_deg"] = numbers(r.gaps_deg);
  j["min_angle_deg"] = r.min_angle_deg;
  j["threshold_deg"] = r.threshold_deg;
  j["verdict"] = r.verdict;
  return j;
}

json to_json(const DimensionReport& r) {
  json j;
  j["verdict"] = r.verdict;
  j["cells"] = r.cells;
  j["wrong_dimension_cells"] = r.wrong_dimension_cells;
  j["isolated_vertices"] = r.isolated_vertices;
  j["ambiguous_cells"] = r.ambiguous_cells;
  j["tie_area_fraction"] = r.tie_area_fraction;
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
  if (!f) throw Error("failed writing " + path);
}

}  // namespace conflict
