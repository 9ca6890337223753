// Python bindings: chart access, time separation, Busemann limits, and the
// scenario runners (reports passed as JSON text; the package wrapper decodes
// them to dicts).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "lorlab/busemann.hpp"
#include "lorlab/errors.hpp"
#include "lorlab/metric.hpp"
#include "lorlab/scenario.hpp"
#include "lorlab/timesep.hpp"

namespace py = pybind11;
using namespace lorlab;

namespace {

std::vector<std::vector<double>> matrix_rows(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> rows(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows[i].resize(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Numerical checks for Lorentzian splitting machinery";

  auto base_exc = py::register_exception<Error>(m, "LorlabError");
  py::register_exception<ConfigError>(m, "ConfigError", base_exc);

  m.def("builtin_charts", &MetricChart::builtin_names,
        "Names of the built-in charts");

  py::class_<MetricChart>(m, "Chart")
      .def_static("resolve", &resolve_chart, py::arg("name_or_path"),
                  "Built-in chart by name, or a metric-spec JSON file by path")
      .def("dim", &MetricChart::dim)
      .def("domain",
           [](const MetricChart& c) {
             std::vector<std::vector<double>> out;
             for (const auto& ax : c.domain_box())
               out.push_back({ax[0], ax[1]});
             return out;
           },
           "Coordinate box, one [lo, hi] per axis")
      .def("metric",
           [](const MetricChart& c, const std::vector<double>& x) {
             return matrix_rows(eval_metric(c, x).g);
           },
           py::arg("x"), "Metric components g_ij at x")
      .def("ricci",
           [](const MetricChart& c, const std::vector<double>& x) {
             return matrix_rows(ricci(c, x));
           },
           py::arg("x"), "Ricci tensor components at x");

  m.def(
      "ell",
      [](const MetricChart& c, const std::vector<double>& x,
         const std::vector<double>& y) { return ell(c, x, y).value; },
      py::arg("chart"), py::arg("x"), py::arg("y"),
      "Time separation: sup of proper time over future causal curves from x "
      "to y; -inf when not causally connectable");

  m.def(
      "rti_check",
      [](const MetricChart& c, const std::vector<double>& x,
         const std::vector<double>& y, const std::vector<double>& z,
         double tol) {
        RtiReport r = check_rti(c, x, y, z, tol);
        py::dict d;
        d["l_xz"] = r.l_xz;
        d["l_xy"] = r.l_xy;
        d["l_yz"] = r.l_yz;
        d["slack"] = r.slack;
        d["tol"] = r.tol;
        d["pass"] = r.pass;
        return d;
      },
      py::arg("chart"), py::arg("x"), py::arg("y"), py::arg("z"),
      py::arg("tol") = 1e-6,
      "Reverse triangle inequality ell(x,z) >= ell(x,y) + ell(y,z)");

  m.def(
      "busemann_limit",
      [](const MetricChart& c, const std::vector<double>& base,
         const std::vector<double>& tangent, const std::vector<double>& x) {
        std::vector<double> sched = default_r_schedule(c, base);
        LineSpec line = make_line(c, base, tangent, sched.back());
        BusemannField field(line, BusemannDirection::forward, sched);
        return busemann_limit(field, x).limit;
      },
      py::arg("chart"), py::arg("base"), py::arg("tangent"), py::arg("x"),
      "Extrapolated forward Busemann limit of the line through base with the "
      "given tangent, evaluated at x");

  m.def(
      "default_scenario_text",
      [](const std::string& chart) { return Scenario::defaults(chart).to_json(); },
      py::arg("chart") = "minkowski2d",
      "Default scenario for a chart, as JSON text");

  m.def(
      "run_text",
      [](const std::string& command, const std::string& scenario_json) {
        Scenario sc = Scenario::from_json_text(scenario_json);
        return run_command(command, sc).to_json();
      },
      py::arg("command"), py::arg("scenario_json"),
      "Run one subcommand (timesep, busemann, comparison, bochner, split) "
      "on a scenario given as JSON text; returns the report as JSON text. "
      "Does not write files.");
}
