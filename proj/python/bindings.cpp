#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rsbound/bound.hpp"
#include "rsbound/oracle.hpp"
#include "rsbound/special.hpp"
#include "rsbound/sweep.hpp"
#include "rsbound/testfn.hpp"
#include "rsbound/wightman.hpp"

namespace py = pybind11;
using namespace rsbound;

namespace {

py::dict row_dict(const SweepRow& r) {
  py::dict d;
  d["p_dark"] = r.p_dark;
  d["p_max"] = r.p_max;
  d["raw_bound"] = r.raw_bound;
  d["zeta_star"] = r.zeta_star;
  d["e_zeta"] = r.e_zeta;
  d["p_ideal"] = r.p_ideal;
  d["ratio"] = r.ratio ? py::object(py::float_(*r.ratio)) : py::object(py::none());
  d["converged"] = r.converged;
  d["boundary_minimum"] = r.boundary_minimum;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Click-probability bounds for finite-size detectors of coherent states";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("bessel_j1", &bessel_j1, py::arg("x"));
  m.def("bump_theta", &bump_theta, py::arg("s"));
  m.def("bump_phi", &bump_phi, py::arg("s"));
  m.def("gaussian", &gaussian, py::arg("eta"), py::arg("variance"));

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double alpha, double r_ratio) { return ModelParams{alpha, r_ratio}; }),
           py::arg("alpha") = 1.0, py::arg("r_ratio") = 1.0)
      .def_readwrite("alpha", &ModelParams::alpha)
      .def_readwrite("r_ratio", &ModelParams::r_ratio)
      .def("validate", &ModelParams::validate)
      .def("center", &ModelParams::center)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(alpha=" + std::to_string(p.alpha) +
               ", r_ratio=" + std::to_string(p.r_ratio) + ")";
      });

  m.def("smearing_f",
        [](std::array<double, 4> x, const ModelParams& p) {
          return smearing_f(std::span<const double, 4>(x), p);
        },
        py::arg("x"), py::arg("params"));
  m.def("profile_h", &onshell_profile_h, py::arg("u"));
  m.def("onshell_ft",
        [](double k, double mu, const ModelParams& p) { return onshell_ft(k, mu, p); },
        py::arg("k"), py::arg("mu"), py::arg("params"));

  m.def("w2_self", [](const ModelParams& p) { return w2_self(p).value; }, py::arg("params"),
        py::call_guard<py::gil_scoped_release>());
  m.def("boosted_overlap",
        [](double eta, const ModelParams& p) { return boosted_overlap(eta, p).value; },
        py::arg("eta"), py::arg("params"), py::call_guard<py::gil_scoped_release>());

  py::class_<OverlapSettings>(m, "OverlapSettings")
      .def(py::init<>())
      .def_readwrite("eta_max", &OverlapSettings::eta_max)
      .def_readwrite("nodes_per_panel", &OverlapSettings::nodes_per_panel)
      .def_readwrite("tail_threshold", &OverlapSettings::tail_threshold)
      .def_readwrite("interp_tolerance", &OverlapSettings::interp_tolerance)
      .def_readwrite("threads", &OverlapSettings::threads)
      .def_property(
          "tolerance", [](const OverlapSettings& s) { return s.spec.rel_tol; },
          [](OverlapSettings& s, double v) { s.spec.rel_tol = v; })
      .def("validate", &OverlapSettings::validate)
      .def("hash", &OverlapSettings::hash, py::arg("r_ratio"));

  py::class_<OverlapTable>(m, "OverlapTable")
      .def("__call__", &OverlapTable::operator(), py::arg("eta"))
      .def("shifted", &OverlapTable::shifted, py::arg("eta"))
      .def_property_readonly("params", &OverlapTable::params)
      .def_property_readonly("w0", &OverlapTable::w0)
      .def_property_readonly("eta_max", &OverlapTable::eta_max)
      .def_property_readonly("converged", &OverlapTable::converged)
      .def_property_readonly("max_interp_error", &OverlapTable::max_interp_error)
      .def_property_readonly("settings_hash", &OverlapTable::settings_hash)
      .def("with_alpha", &OverlapTable::with_alpha, py::arg("alpha"))
      .def("save", &OverlapTable::save, py::arg("file"))
      .def_static("load", &OverlapTable::load, py::arg("file"), py::arg("alpha"));

  m.def("build_overlap_table", &build_overlap_table, py::arg("params"),
        py::arg("settings") = OverlapSettings{}, py::call_guard<py::gil_scoped_release>());
  m.def("cached_overlap_table", &cached_overlap_table, py::arg("params"),
        py::arg("settings") = OverlapSettings{}, py::arg("cache_dir") = std::filesystem::path{},
        py::call_guard<py::gil_scoped_release>());

  m.def("approx_error", &approx_error, py::arg("zeta"), py::arg("table"),
        py::call_guard<py::gil_scoped_release>());
  m.def("norm_factor", &norm_factor, py::arg("zeta"));
  m.def("generic_bound", &generic_bound, py::arg("e"), py::arg("norm"), py::arg("p_dark"));
  m.def("ideal_click_probability", &ideal_click_probability, py::arg("w0"));
  m.def("p_ideal", [](const ModelParams& p) { return p_ideal(p).value; }, py::arg("params"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<ZetaSearchSpec>(m, "ZetaSearchSpec")
      .def(py::init<>())
      .def_readwrite("zeta_min", &ZetaSearchSpec::zeta_min)
      .def_readwrite("zeta_max", &ZetaSearchSpec::zeta_max)
      .def_readwrite("grid_points", &ZetaSearchSpec::grid_points)
      .def_readwrite("rel_width", &ZetaSearchSpec::rel_width)
      .def("validate", &ZetaSearchSpec::validate);

  py::class_<BoundResult>(m, "BoundResult")
      .def_readonly("p_dark", &BoundResult::p_dark)
      .def_readonly("zeta_star", &BoundResult::zeta_star)
      .def_readonly("e_zeta", &BoundResult::e_zeta)
      .def_readonly("raw_bound", &BoundResult::raw_bound)
      .def_readonly("p_max", &BoundResult::p_max)
      .def_readonly("converged", &BoundResult::converged)
      .def_readonly("boundary_minimum", &BoundResult::boundary_minimum)
      .def_readonly("limit_case", &BoundResult::limit_case);

  m.def("bound_min", &bound_min, py::arg("p_dark"), py::arg("table"),
        py::arg("search") = ZetaSearchSpec{}, py::call_guard<py::gil_scoped_release>());

  m.def(
      "sweep",
      [](const OverlapTable& table, std::vector<double> p_darks, const ZetaSearchSpec& search,
         int threads) {
        SweepCurve curve;
        {
          py::gil_scoped_release release;
          curve = sweep_curve(table, p_darks, search, threads);
        }
        py::list rows;
        for (const auto& r : curve.rows) rows.append(row_dict(r));
        return rows;
      },
      py::arg("table"), py::arg("p_darks"), py::arg("search") = ZetaSearchSpec{},
      py::arg("threads") = 1);

  py::class_<OracleReport>(m, "OracleReport")
      .def_readonly("quantity", &OracleReport::quantity)
      .def_readonly("main_value", &OracleReport::main_value)
      .def_readonly("oracle_value", &OracleReport::oracle_value)
      .def_readonly("oracle_error", &OracleReport::oracle_error)
      .def_readonly("deviation", &OracleReport::deviation)
      .def_readonly("tolerance", &OracleReport::tolerance)
      .def_readonly("pass_", &OracleReport::pass);

  m.def(
      "verify",
      [](const ModelParams& p, int threads) {
        VerifyOptions o;
        o.params = p;
        o.threads = threads;
        return run_verification(o);
      },
      py::arg("params") = ModelParams{1.0, 2.0}, py::arg("threads") = 1,
      py::call_guard<py::gil_scoped_release>());
}
