// Python module micropolar_inverse._core.
//
// Field arrays follow the grid layout: cell fields are (ny, nx), x-face
// components (ny, nx + 1), y-face components (ny + 1, nx), row j = 0 at the
// south wall.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "micropolar/config.hpp"
#include "micropolar/errors.hpp"
#include "micropolar/harness.hpp"
#include "micropolar/operators.hpp"
#include "micropolar/potential.hpp"

namespace py = pybind11;
using namespace micropolar;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> take(const Array& a, py::ssize_t rows, py::ssize_t cols,
                         const char* name) {
  if (a.ndim() != 2 || a.shape(0) != rows || a.shape(1) != cols)
    throw ValidationError("shape", std::string(name) + " must have shape (" +
                                       std::to_string(rows) + ", " +
                                       std::to_string(cols) + ")");
  return std::vector<double>(a.data(), a.data() + a.size());
}

Array give(std::span<const double> v, py::ssize_t rows, py::ssize_t cols) {
  Array out({rows, cols});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ScalarField to_scalar(const Grid& g, const Array& a, const char* name) {
  return ScalarField(g, take(a, g.ny(), g.nx(), name));
}

VectorField to_vector(const Grid& g, const Array& x, const Array& y) {
  return VectorField(g, take(x, g.ny(), g.nx() + 1, "x component"),
                     take(y, g.ny() + 1, g.nx(), "y component"));
}

Array from_scalar(const ScalarField& s) {
  return give(s.values(), s.grid().ny(), s.grid().nx());
}

py::tuple from_vector(const VectorField& v) {
  const Grid& g = v.grid();
  return py::make_tuple(give(v.x_values(), g.ny(), g.nx() + 1),
                        give(v.y_values(), g.ny() + 1, g.nx()));
}

Grid grid_for(const Array& cells, double lx, double ly) {
  if (cells.ndim() != 2) throw ValidationError("shape", "cell array must be 2-D");
  return Grid(static_cast<int>(cells.shape(1)), static_cast<int>(cells.shape(0)), lx, ly);
}

py::dict state_dict(const FlowState& s) {
  py::dict d;
  d["t"] = s.t;
  d["rho"] = from_scalar(s.rho.field());
  d["u"] = from_vector(s.u);
  d["w"] = from_scalar(s.w);
  d["p"] = from_scalar(s.p);
  d["h"] = from_scalar(s.h);
  return d;
}

py::dict report_dict(const ReconstructionReport& r) {
  py::dict d;
  d["status"] = r.status;
  d["message"] = r.message;
  d["converged"] = r.converged;
  d["iterations"] = r.iterations;
  d["increments"] = r.increments;
  d["times"] = std::vector<double>(r.recovered.times().begin(), r.recovered.times().end());
  d["f"] = std::vector<double>(r.recovered.f().begin(), r.recovered.f().end());
  d["g"] = std::vector<double>(r.recovered.g().begin(), r.recovered.g().end());
  d["h_eps"] = r.h_eps;
  d["r_eps"] = r.r_eps;
  d["gamma_1_min"] = r.gamma_1_min;
  d["gamma_2_min"] = r.gamma_2_min;
  d["compatibility"] = py::make_tuple(r.compatibility.residual_u, r.compatibility.residual_w);
  return d;
}

Observations make_observations(std::vector<double> t, std::vector<double> u,
                               std::vector<double> w) {
  Observations o;
  o.times = std::move(t);
  o.phi_u = std::move(u);
  o.phi_w = std::move(w);
  o.validate();
  return o;
}

py::dict series_dict(const Observations& o) {
  py::dict d;
  d["times"] = o.times;
  d["phi_u"] = o.phi_u;
  d["phi_w"] = o.phi_w;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Forward and inverse solver for 2D nonhomogeneous micropolar flow";
  m.attr("__version__") = code_version();

  static py::exception<Error> base(m, "MicropolarError", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<CompatibilityError>(m, "CompatibilityError", base.ptr());
  py::register_exception<DegeneracyError>(m, "DegeneracyError", base.ptr());
  py::register_exception<AlignmentError>(m, "AlignmentError", base.ptr());
  py::register_exception<StepError>(m, "StepError", base.ptr());
  py::register_exception<MonitorViolation>(m, "MonitorViolation", base.ptr());
  py::register_exception<CoercivityError>(m, "CoercivityError", base.ptr());

  py::class_<Config>(m, "Config")
      .def(py::init<>())
      .def_static("parse", [](const std::string& text) { return Config::parse(text); })
      .def_static("load", &Config::load, py::arg("path"))
      .def_static("from_file", &load_config_or_manifest, py::arg("path"),
                  "Config file or manifest.json")
      .def("serialize", &Config::serialize)
      .def("set", [](Config& c, const std::string& k, const py::object& v) {
        if (py::isinstance<py::bool_>(v))
          c.set(k, v.cast<bool>() ? "true" : "false");
        else
          c.set(k, py::str(v).cast<std::string>());
      })
      .def("get", &Config::text, py::arg("key"))
      .def("number", &Config::number, py::arg("key"))
      .def("__eq__", [](const Config& a, const Config& b) { return a == b; })
      .def_static("keys", [] {
        std::vector<std::string> out;
        for (const ConfigKey& k : config_keys()) out.emplace_back(k.name);
        return out;
      });

  m.def("sha256_hex", [](const std::string& s) { return sha256_hex(s); });

  m.def(
      "solve_potential",
      [](const Array& rho, const Array& mx, const Array& my, double lx, double ly,
         double tolerance) {
        const Grid g = grid_for(rho, lx, ly);
        PotentialProblem p{DensityField(to_scalar(g, rho, "rho")), to_vector(g, mx, my),
                           tolerance};
        SolveStats stats;
        const ScalarField h = solve_potential(p, &stats);
        return py::make_tuple(from_scalar(h), stats.iterations);
      },
      py::arg("rho"), py::arg("m_x"), py::arg("m_y"), py::arg("lx") = 1.0,
      py::arg("ly") = 1.0, py::arg("tolerance") = 1e-10,
      "Weighted Neumann potential. Returns (h, iterations).");

  m.def(
      "gradient",
      [](const Array& s, double lx, double ly) {
        const Grid g = grid_for(s, lx, ly);
        return from_vector(gradient(to_scalar(g, s, "s")));
      },
      py::arg("s"), py::arg("lx") = 1.0, py::arg("ly") = 1.0);

  m.def(
      "divergence",
      [](const Array& vx, const Array& vy, double lx, double ly) {
        if (vx.ndim() != 2) throw ValidationError("shape", "x component must be 2-D");
        const Grid g(static_cast<int>(vx.shape(1)) - 1, static_cast<int>(vx.shape(0)), lx, ly);
        return from_scalar(divergence(to_vector(g, vx, vy)));
      },
      py::arg("v_x"), py::arg("v_y"), py::arg("lx") = 1.0, py::arg("ly") = 1.0);

  m.def(
      "curl_of_scalar",
      [](const Array& w, double lx, double ly) {
        const Grid g = grid_for(w, lx, ly);
        return from_vector(curl_of_scalar(to_scalar(g, w, "w")));
      },
      py::arg("w"), py::arg("lx") = 1.0, py::arg("ly") = 1.0);

  m.def(
      "curl_of_vector",
      [](const Array& vx, const Array& vy, double lx, double ly) {
        if (vx.ndim() != 2) throw ValidationError("shape", "x component must be 2-D");
        const Grid g(static_cast<int>(vx.shape(1)) - 1, static_cast<int>(vx.shape(0)), lx, ly);
        return from_scalar(curl_of_vector(to_vector(g, vx, vy)));
      },
      py::arg("v_x"), py::arg("v_y"), py::arg("lx") = 1.0, py::arg("ly") = 1.0);

  m.def(
      "differentiate_series",
      [](std::vector<double> t, std::vector<double> u, std::vector<double> w) {
        const Observations d = differentiate_series(make_observations(t, u, w));
        return py::make_tuple(d.phi_u, d.phi_w);
      },
      py::arg("times"), py::arg("phi_u"), py::arg("phi_w"));

  m.def(
      "simulate",
      [](const Config& c, bool keep_states) {
        const Scenario sc = build_scenario(c);
        Trajectory tr;
        MonitorReport monitors;
        {
          py::gil_scoped_release release;
          Monitor monitor(sc.monitors, &sc.setup.shapes, &sc.probes);
          tr = solve_forward(sc.sources, sc.setup, monitor.observer());
          monitors = monitor.report();
        }
        py::dict d = series_dict(generate_synthetic_observations(tr, sc.probes, sc.noise));
        std::vector<double> energy;
        for (const MonitorRecord& r : monitors.records) energy.push_back(r.energy);
        d["energy"] = energy;
        d["violations"] = monitors.violations.size();
        d["final"] = state_dict(tr.states.back());
        if (keep_states) {
          py::list states;
          for (const FlowState& s : tr.states) states.append(state_dict(s));
          d["states"] = states;
        }
        return d;
      },
      py::arg("config"), py::arg("keep_states") = false,
      "Forward solve without writing files. Returns observations, energy and "
      "the final state.");

  m.def(
      "reconstruct",
      [](const Config& c, std::vector<double> t, std::vector<double> u,
         std::vector<double> w) {
        const Scenario sc = build_scenario(c);
        const Observations obs = make_observations(std::move(t), std::move(u), std::move(w));
        py::gil_scoped_release release;
        ReconstructionReport r = reconstruct(obs, sc.probes, sc.setup, sc.inverse);
        py::gil_scoped_acquire acquire;
        return report_dict(r);
      },
      py::arg("config"), py::arg("times"), py::arg("phi_u"), py::arg("phi_w"),
      "Picard reconstruction of (f, g) from observation series.");

  m.def(
      "run_forward",
      [](const Config& c, const std::string& out) {
        const Scenario sc = build_scenario(c);
        py::gil_scoped_release release;
        const ForwardResult r = run_forward(sc, out);
        py::gil_scoped_acquire acquire;
        py::dict d = series_dict(r.observations);
        d["violations"] = r.monitors.violations.size();
        return d;
      },
      py::arg("config"), py::arg("out"));

  m.def(
      "run_twin",
      [](const Config& c, const std::string& out) {
        const Scenario sc = build_scenario(c);
        py::gil_scoped_release release;
        const TwinResult r = run_twin(sc, out);
        py::gil_scoped_acquire acquire;
        py::dict d = report_dict(r.report);
        d["error_f"] = r.error_f;
        d["error_g"] = r.error_g;
        d["relative_f"] = r.relative_f;
        d["relative_g"] = r.relative_g;
        d["f_true"] = std::vector<double>(sc.sources.f().begin(), sc.sources.f().end());
        d["g_true"] = std::vector<double>(sc.sources.g().begin(), sc.sources.g().end());
        return d;
      },
      py::arg("config"), py::arg("out"));

  m.def(
      "run_invert",
      [](const Config& c, const std::string& observations, const std::string& out) {
        const Scenario sc = build_scenario(c);
        const Observations obs = load_observations(observations);
        py::gil_scoped_release release;
        const ReconstructionReport r = run_invert(sc, obs, out);
        py::gil_scoped_acquire acquire;
        return report_dict(r);
      },
      py::arg("config"), py::arg("observations"), py::arg("out"));

  m.def(
      "run_diagnose",
      [](const std::string& trajectory, const std::string& out) {
        const MonitorReport r = run_diagnose(trajectory, out);
        py::dict d;
        d["records"] = r.records.size();
        d["violations"] = r.violations.size();
        return d;
      },
      py::arg("trajectory"), py::arg("out"));
}
