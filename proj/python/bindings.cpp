#include "conflict/cli.hpp"
#include "conflict/io.hpp"
#include "conflict/metrics.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace conflict;

namespace {

Point to_point(const std::vector<double>& c) {
  if (c.size() < 2 || c.size() > 3) throw Error("points need 2 or 3 coordinates");
  Point p = Point::Zero();
  for (std::size_t k = 0; k < c.size(); ++k) p[k] = c[k];
  return p;
}

py::array_t<double> rows(const std::vector<Point>& pts, int dim) {
  py::array_t<double> a({static_cast<py::ssize_t>(pts.size()), static_cast<py::ssize_t>(dim)});
  auto m = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int k = 0; k < dim; ++k) m(i, k) = pts[i][k];
  }
  return a;
}

Window window_of(const Scene& s, const std::vector<double>& w, double half) {
  return w.empty() ? window_around(Point::Zero(), half, s.dimension()) : parse_window(w, s.dimension());
}

py::dict complex_dict(const ConflictComplex& c) {
  py::dict d;
  d["vertices"] = rows(c.vertices, c.dimension);
  const int k = c.dimension;
  py::array_t<int> cells({static_cast<py::ssize_t>(c.cells.size()), static_cast<py::ssize_t>(k)});
  py::array_t<int> pairs({static_cast<py::ssize_t>(c.cells.size()), static_cast<py::ssize_t>(2)});
  auto cm = cells.mutable_unchecked<2>();
  auto pm = pairs.mutable_unchecked<2>();
  for (std::size_t i = 0; i < c.cells.size(); ++i) {
    for (int j = 0; j < k; ++j) cm(i, j) = c.cells[i].v[j];
    pm(i, 0) = c.cells[i].pair.i;
    pm(i, 1) = c.cells[i].pair.j;
  }
  d["cells"] = cells;
  d["pairs"] = pairs;
  d["residuals"] = py::array_t<double>(c.residuals.size(), c.residuals.data());
  d["tie_area_fraction"] = c.tie_area_fraction;
  d["spacing"] = c.spacing;
  return d;
}

}  // namespace

PYBIND11_MODULE(_conflictsets, m) {
  m.doc() = "Conflict sets of disjoint closed sets in the plane and in space";

  py::register_exception<Error>(m, "ConflictError", PyExc_ValueError);

  py::class_<Scene>(m, "Scene")
      .def_property_readonly("dimension", &Scene::dimension)
      .def_property_readonly("site_ids", [](const Scene& s) {
        std::vector<std::string> ids;
        for (const auto& site : s.sites()) ids.push_back(site.id);
        return ids;
      })
      .def("to_json", [](const Scene& s) { return scene_to_json(s); })
      .def("__len__", &Scene::size);

  m.def("parse_scene", [](const std::string& text) { return parse_scene(text); }, py::arg("text"));
  m.def("demo_scene", &demo_scene);

  m.def("label", [](const Scene& s, const std::vector<double>& x) {
    const TerritoryLabel l = label(s, to_point(x));
    return py::make_tuple(l.argmin, l.min_distance, l.margin);
  }, py::arg("scene"), py::arg("x"));

  m.def("extract", [](const Scene& s, const std::vector<double>& window, int resolution, int workers) {
    ExtractOptions o;
    o.resolution = resolution;
    o.workers = workers;
    ConflictComplex c;
    {
      py::gil_scoped_release release;
      c = extract_conflict(s, window_of(s, window, 2.0), o);
    }
    return complex_dict(c);
  }, py::arg("scene"), py::arg("window") = std::vector<double>{}, py::arg("resolution") = 128,
        py::arg("workers") = 1);

  m.def("spherical_conflict", [](const Scene& s, const std::vector<double>& x0, int resolution) {
    const SupportSet sup = support_sets(s, to_point(x0));
    const SphericalComplex c = spherical_conflict(sup, {resolution});
    py::dict d;
    d["r0"] = sup.r0;
    d["vertices"] = rows(c.vertices, c.dimension);
    d["excluded"] = sup.excluded();
    return d;
  }, py::arg("scene"), py::arg("x0"), py::arg("resolution") = 0);

  // Reports come back as JSON text; the package turns them into dicts.
  m.def("verify_tangent_json", [](const Scene& s, const std::vector<double>& x0, const std::vector<double>& eps,
                                  int resolution, int workers) {
    VerifyOptions o;
    o.resolution = resolution;
    o.workers = workers;
    TangentReport r;
    {
      py::gil_scoped_release release;
      r = verify_tangent_cone(s, to_point(x0), eps, o);
    }
    return to_json(r, s.dimension()).dump();
  }, py::arg("scene"), py::arg("x0"), py::arg("eps"), py::arg("resolution") = 96, py::arg("workers") = 1);

  m.def("no_cusp_json", [](const Scene& s, const std::vector<double>& y0, const std::vector<double>& eps) {
    return to_json(no_cusp_check(s, to_point(y0), eps)).dump();
  }, py::arg("scene"), py::arg("y0"), py::arg("eps"));

  m.def("link_components", [](const Scene& s, const std::vector<double>& x0, double eps,
                              const std::vector<double>& window, int resolution) {
    ExtractOptions o;
    o.resolution = resolution;
    const Point p = to_point(x0);
    const Window w = window.empty() ? window_around(p, 2.5 * eps, s.dimension()) : parse_window(window, s.dimension());
    return link_components(extract_conflict(s, w, o), p, eps);
  }, py::arg("scene"), py::arg("x0"), py::arg("eps"), py::arg("window") = std::vector<double>{},
        py::arg("resolution") = 96);

  m.def("dimension_check_json", [](const Scene& s, const std::vector<double>& window, int resolution) {
    ExtractOptions o;
    o.resolution = resolution;
    return to_json(dimension_check(extract_conflict(s, window_of(s, window, 2.0), o))).dump();
  }, py::arg("scene"), py::arg("window") = std::vector<double>{}, py::arg("resolution") = 128);

  m.def("run", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = run(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Run the command-line tool in-process; returns (exit code, stdout, stderr).");
}
