#include "conflict/cli.hpp"

#include "conflict/config.hpp"
#include "conflict/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <sstream>

namespace conflict {

namespace {

namespace df = defaults;

struct RunConfig {
  std::string scene;
  std::vector<double> window;
  int res = 0;  // 0: command default
  std::vector<double> at;
  std::vector<double> eps;
  std::vector<double> scales;
  double tol = 0.0;  // 0: command default
  unsigned long long seed = df::kSeed;
  std::string out;
  int workers = df::kWorkers;
  std::string report;
  std::string demo;
};

// Verdict-level failure, distinct from usage errors.
enum Exit { kOk = 0, kFail = 1, kUsage = 2 };

template <std::size_t N>
std::vector<double> to_vector(const std::array<double, N>& a) {
  return {a.begin(), a.end()};
}

Point at_point(const RunConfig& cfg, int dimension) {
  if (cfg.at.empty()) throw Error("--at is required");
  if (static_cast<int>(cfg.at.size()) != dimension) {
    throw Error("--at needs " + std::to_string(dimension) + " coordinates for this scene");
  }
  Point p = Point::Zero();
  for (int k = 0; k < dimension; ++k) p[k] = cfg.at[k];
  return p;
}

Window window_for(const RunConfig& cfg, int dimension) {
  if (cfg.window.empty()) return window_around(Point::Zero(), df::kWindowHalf, dimension);
  return parse_window(cfg.window, dimension);
}

int res_or(const RunConfig& cfg, int fallback) { return cfg.res > 0 ? cfg.res : fallback; }
double tol_or(const RunConfig& cfg, double fallback) { return cfg.tol > 0.0 ? cfg.tol : fallback; }

void emit(const RunConfig& cfg, const json& report, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (cfg.report.empty()) {
    out << text;
  } else {
    write_file(cfg.report, text);
    if (report.contains("verdict")) out << report["verdict"].get<std::string>() << "\n";
  }
}

std::string file_name(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}

int cmd_extract(const RunConfig& cfg, std::ostream& out) {
  const Scene scene = load_scene(cfg.scene);
  ExtractOptions opt;
  opt.resolution = res_or(cfg, df::kExtractResolution);
  opt.workers = cfg.workers;
  const ConflictComplex c = extract_conflict(scene, window_for(cfg, scene.dimension()), opt);
  json side = complex_sidecar(c);
  if (!cfg.out.empty()) {
    std::ostringstream geom;
    if (c.dimension == 2) {
      write_complex_csv(c, geom);
      write_file(cfg.out + ".csv", geom.str());
    } else {
      write_complex_obj(c, geom);
      write_file(cfg.out + ".obj", geom.str());
    }
    write_file(cfg.out + ".json", side.dump(2) + "\n");
  }
  side.erase("residuals");
  emit(cfg, side, out);
  return kOk;
}

int cmd_supports(const RunConfig& cfg, std::ostream& out) {
  const Scene scene = load_scene(cfg.scene);
  const SupportSet s = support_sets(scene, at_point(cfg, scene.dimension()));
  const json j = to_json(s);
  if (!cfg.out.empty()) write_file(cfg.out + ".json", j.dump(2) + "\n");
  emit(cfg, j, out);
  return kOk;
}

int cmd_sphere_conf(const RunConfig& cfg, std::ostream& out) {
  const Scene scene = load_scene(cfg.scene);
  const SupportSet s = support_sets(scene, at_point(cfg, scene.dimension()));
  const SphericalComplex sc = spherical_conflict(s, SphericalOptions{cfg.res});
  json j = to_json(sc);
  j["excluded_supports"] = s.excluded();
  if (!cfg.out.empty()) {
    std::ostringstream geom;
    if (sc.dimension == 2) {
      write_spherical_csv(sc, geom);
      write_file(cfg.out + ".csv", geom.str());
    } else {
      write_spherical_obj(sc, geom);
      write_file(cfg.out + ".obj", geom.str());
    }
  }
  emit(cfg, j, out);
  return kOk;
}

VerifyOptions verify_options(const RunConfig& cfg) {
  VerifyOptions v;
  v.resolution = res_or(cfg, df::kTangentResolution);
  v.accept_tol = tol_or(cfg, df::kTangentAcceptTol);
  v.jitter = df::kTangentJitter;
  v.window_factor = df::kTangentWindowFactor;
  v.workers = cfg.workers;
  v.seed = cfg.seed;
  v.territory_samples = df::kTerritorySamples;
  v.cap_samples = df::kCapSamples;
  return v;
}

int cmd_verify_tangent(const RunConfig& cfg, std::ostream& out) {
  const Scene scene = load_scene(cfg.scene);
  const Point x0 = at_point(cfg, scene.dimension());
  const auto eps = cfg.eps.empty() ? to_vector(df::kTangentEps) : cfg.eps;
  const TangentReport r = verify_tangent_cone(scene, x0, eps, verify_options(cfg));
  emit(cfg, to_json(r, scene.dimension()), out);
  return r.verdict == "PASS" ? kOk : kFail;
}

struct EmbeddingRun {
  ConflictComplex complex;
  EmbeddingReport report;
};

EmbeddingRun embedding_run(const Scene& scene, const Point& x0, const RunConfig& cfg) {
  if (scene.dimension() != 3) throw Error("embedding scan needs a 3D scene");
  const auto scales = cfg.scales.empty() ? to_vector(df::kEmbeddingScales) : cfg.scales;
  ExtractOptions opt;
  opt.resolution = res_or(cfg, df::kEmbeddingResolution);
  opt.workers = cfg.workers;
  const Window w = cfg.window.empty() ? window_around(x0, df::kEmbeddingWindowHalf, 3)
                                      : parse_window(cfg.window, 3);
  EmbeddingRun run{extract_conflict(scene, w, opt), {}};
  EmbeddingOptions eo;
  eo.pairs = df::kEmbeddingPairs;
  eo.growth_threshold = df::kEmbeddingGrowth;
  eo.workers = cfg.workers;
  run.report = embedding_scan(GeodesicGraph::build(run.complex), run.complex, x0, scales, eo);
  return run;
}

int cmd_embedding(const RunConfig& cfg, std::ostream& out) {
  const Scene scene = load_scene(cfg.scene);
  const Point x0 = at_point(cfg, scene.dimension());
  emit(cfg, to_json(embedding_run(scene, x0, cfg).report), out);
  return kOk;
}

int cmd_no_cusp(const RunConfig& cfg, std::ostream& out) {
  const Scene scene = load_scene(cfg.scene);
  const Point y0 = at_point(cfg, scene.dimension());
  NoCuspOptions opt;
  opt.resolution = res_or(cfg, df::kNoCuspResolution);
  opt.min_angle_deg = tol_or(cfg, df::kNoCuspMinAngleDeg);
  opt.linkage_deg = df::kBranchLinkageDeg;
  opt.workers = cfg.workers;
  const auto eps = cfg.eps.empty() ? to_vector(df::kNoCuspEps) : cfg.eps;
  const NoCuspReport r = no_cusp_check(scene, y0, eps, opt);
  emit(cfg, to_json(r), out);
  return r.verdict == "PASS" ? kOk : kFail;
}

double single_eps(const RunConfig& cfg) {
  if (cfg.eps.empty()) return df::kLinkEps;
  if (cfg.eps.size() != 1) throw Error("link takes a single --eps value");
  return cfg.eps.front();
}

int cmd_link(const RunConfig& cfg, std::ostream& out) {
  const Scene scene = load_scene(cfg.scene);
  const Point x0 = at_point(cfg, scene.dimension());
  const double eps = single_eps(cfg);
  ExtractOptions opt;
  opt.resolution = res_or(cfg, df::kLinkResolution);
  opt.workers = cfg.workers;
  const Window w = cfg.window.empty()
                       ? window_around(x0, df::kLinkWindowFactor * eps, scene.dimension())
                       : parse_window(cfg.window, scene.dimension());
  const ConflictComplex c = extract_conflict(scene, w, opt);
  json j;
  j["x0"] = to_json(x0, scene.dimension());
  j["eps"] = eps;
  j["components"] = link_components(c, x0, eps);
  emit(cfg, j, out);
  return kOk;
}

int cmd_dim_check(const RunConfig& cfg, std::ostream& out) {
  const Scene scene = load_scene(cfg.scene);
  ExtractOptions opt;
  opt.resolution = res_or(cfg, df::kExtractResolution);
  opt.workers = cfg.workers;
  const ConflictComplex c = extract_conflict(scene, window_for(cfg, scene.dimension()), opt);
  const DimensionReport r = dimension_check(c);
  emit(cfg, to_json(r), out);
  return r.verdict == "PASS" ? kOk : kFail;
}

int cmd_demo(const RunConfig& cfg, std::ostream& out) {
  if (cfg.demo != "paper-example") throw Error("unknown demo '" + cfg.demo + "'");
  const std::string base = cfg.out.empty() ? "paper_example" : cfg.out;
  const Scene scene = demo_scene();
  const Point x0 = Point::Zero();
  json summary;

  const std::string scene_path = base + "_scene.json";
  write_file(scene_path, scene_to_json(scene));
  summary["scene"] = file_name(scene_path);

  ExtractOptions opt;
  opt.resolution = df::kTangentResolution;
  opt.workers = cfg.workers;
  const ConflictComplex full =
      extract_conflict(scene, window_around(x0, df::kWindowHalf, 3), opt);
  {
    std::ostringstream geom;
    write_complex_obj(full, geom);
    write_file(base + "_complex.obj", geom.str());
    write_file(base + "_complex.json", complex_sidecar(full).dump(2) + "\n");
  }
  const DimensionReport dim = dimension_check(full);
  summary["complex"] = {{"geometry", file_name(base + "_complex.obj")},
                        {"vertices", full.vertices.size()},
                        {"cells", full.cells.size()},
                        {"dimension_check", dim.verdict}};

  RunConfig tcfg = cfg;
  tcfg.res = 0;
  tcfg.tol = 0.0;
  const TangentReport tangent =
      verify_tangent_cone(scene, x0, to_vector(df::kTangentEps), verify_options(tcfg));
  write_file(base + "_tangent.json", to_json(tangent, 3).dump(2) + "\n");
  summary["tangent"] = {{"report", file_name(base + "_tangent.json")},
                        {"d_to_spherical", tangent.d_to_spherical},
                        {"verdict", tangent.verdict}};

  RunConfig ecfg = cfg;
  ecfg.res = 0;
  ecfg.window.clear();
  ecfg.scales.clear();
  const EmbeddingRun emb = embedding_run(scene, x0, ecfg);
  const ConflictComplex planes = make_transversal_planes_complex();
  EmbeddingOptions eo;
  eo.pairs = df::kEmbeddingPairs;
  eo.growth_threshold = df::kEmbeddingGrowth;
  eo.workers = cfg.workers;
  const EmbeddingReport cone_emb = embedding_scan(GeodesicGraph::build(planes), planes, x0,
                                                  to_vector(df::kEmbeddingScales), eo);
  write_file(base + "_embedding.json",
             json{{"complex", to_json(emb.report)}, {"cone", to_json(cone_emb)}}.dump(2) + "\n");
  json ratios = json::array();
  for (const auto& s : emb.report.scales) ratios.push_back(s.ratio);
  summary["embedding"] = {{"report", file_name(base + "_embedding.json")},
                          {"ratios", ratios},
                          {"verdict", emb.report.verdict},
                          {"cone_verdict", cone_emb.verdict}};

  const int link_germ = link_components(emb.complex, x0, df::kLinkEps);
  const int link_cone = link_components(planes, x0, df::kLinkEps);
  write_file(base + "_link.json",
             json{{"eps", df::kLinkEps}, {"complex", link_germ}, {"cone", link_cone}}.dump(2) +
                 "\n");
  summary["link"] = {{"report", file_name(base + "_link.json")},
                     {"complex", link_germ},
                     {"cone", link_cone}};

  const bool ok = tangent.verdict == "PASS" && emb.report.verdict == "diverging" &&
                  cone_emb.verdict == "embedded" && link_germ == 2 && link_cone == 1 &&
                  dim.verdict == "PASS";
  summary["verdict"] = ok ? "PASS" : "FAIL";
  emit(cfg, summary, out);
  return ok ? kOk : kFail;
}

}  // namespace

Scene demo_scene() {
  std::vector<Site> sites;
  sites.push_back(Site{"X1", {HyperplanePrim{Point(0, 0, 1), 1.0}, HyperplanePrim{Point(0, 0, 1), -1.0}}});
  sites.push_back(Site{"X2", {PointPrim{Point(1, 0, 0)}, PointPrim{Point(-1, 0, 0)}}});
  return Scene(3, std::move(sites));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conflict sets of disjoint closed sets: extraction and metric checks", "conflict"};
  app.require_subcommand(1);
  RunConfig cfg;

  const auto scene_opt = [&](CLI::App* c) { c->add_option("--scene", cfg.scene, "scene JSON file")->required(); };
  const auto window_opt = [&](CLI::App* c) {
    c->add_option("--window", cfg.window, "xmin,xmax,ymin,ymax[,zmin,zmax]")->delimiter(',');
  };
  const auto res_opt = [&](CLI::App* c) {
    c->add_option("--res", cfg.res, "grid cells per axis")->check(CLI::Range(8, 512));
  };
  const auto at_opt = [&](CLI::App* c) {
    c->add_option("--at", cfg.at, "base point x,y[,z]")->delimiter(',')->required();
  };
  const auto eps_opt = [&](CLI::App* c) {
    c->add_option("--eps", cfg.eps, "slice radii, decreasing")->delimiter(',');
  };
  const auto tol_opt = [&](CLI::App* c, const std::string& what) {
    c->add_option("--tol", cfg.tol, what)->check(CLI::PositiveNumber);
  };
  const auto common = [&](CLI::App* c) {
    c->add_option("--workers", cfg.workers, "threads for grid kernels")->check(CLI::Range(1, 256));
    c->add_option("--report", cfg.report, "write the JSON report here instead of stdout");
    c->add_option("--seed", cfg.seed, "seed for randomized probes");
  };

  auto* extract = app.add_subcommand("extract", "extract the conflict set on a grid");
  scene_opt(extract);
  window_opt(extract);
  res_opt(extract);
  extract->add_option("--out", cfg.out, "geometry base path");
  common(extract);

  auto* supports = app.add_subcommand("supports", "minimal radius and supports at a point");
  scene_opt(supports);
  at_opt(supports);
  supports->add_option("--out", cfg.out, "base path for the supports JSON");
  common(supports);

  auto* sphere = app.add_subcommand("sphere-conf", "conflict set of the supports on the sphere");
  scene_opt(sphere);
  at_opt(sphere);
  sphere->add_option("--res", cfg.res, "circle samples (2D) or icosphere level (3D)");
  sphere->add_option("--out", cfg.out, "geometry base path");
  common(sphere);

  auto* tangent = app.add_subcommand("verify-tangent", "compare slices with the cone over the spherical conflict set");
  scene_opt(tangent);
  at_opt(tangent);
  eps_opt(tangent);
  res_opt(tangent);
  tol_opt(tangent, "chordal Hausdorff bound at the smallest eps");
  common(tangent);

  auto* embed = app.add_subcommand("embedding", "inner/outer distance ratios near a point");
  scene_opt(embed);
  at_opt(embed);
  embed->add_option("--scales", cfg.scales, "probe angles theta, decreasing")->delimiter(',');
  window_opt(embed);
  res_opt(embed);
  common(embed);

  auto* cusp = app.add_subcommand("no-cusp", "branch tangents of a planar conflict set");
  scene_opt(cusp);
  at_opt(cusp);
  eps_opt(cusp);
  res_opt(cusp);
  tol_opt(cusp, "minimum branch angle in degrees");
  common(cusp);

  auto* link = app.add_subcommand("link", "components of the slice with a small sphere");
  scene_opt(link);
  at_opt(link);
  eps_opt(link);
  window_opt(link);
  res_opt(link);
  common(link);

  auto* dim = app.add_subcommand("dim-check", "codimension-one check of the extracted set");
  scene_opt(dim);
  window_opt(dim);
  res_opt(dim);
  common(dim);

  auto* demo = app.add_subcommand("demo", "built-in demonstration");
  demo->add_option("name", cfg.demo, "paper-example")->required();
  demo->add_option("--out", cfg.out, "base path for the emitted files");
  common(demo);

  auto* defaults_cmd = app.add_subcommand("defaults", "print the table of numeric defaults");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*extract) return cmd_extract(cfg, out);
    if (*supports) return cmd_supports(cfg, out);
    if (*sphere) return cmd_sphere_conf(cfg, out);
    if (*tangent) return cmd_verify_tangent(cfg, out);
    if (*embed) return cmd_embedding(cfg, out);
    if (*cusp) return cmd_no_cusp(cfg, out);
    if (*link) return cmd_link(cfg, out);
    if (*dim) return cmd_dim_check(cfg, out);
    if (*demo) return cmd_demo(cfg, out);
    if (*defaults_cmd) {
      for (const auto& e : df::kTable) out << e.name << "\t" << e.value << "\t" << e.meaning << "\n";
      return kOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace conflict
