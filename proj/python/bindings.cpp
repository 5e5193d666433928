// Python bindings. Fields cross the boundary as float64 arrays of shape
// (nz, nx, ny), which is the native storage order.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <iostream>
#include <numbers>
#include <sstream>

#include "penudge/cli/commands.hpp"

namespace py = pybind11;
using namespace penudge;
using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

ScalarField to_field(const GridSpec& g, const Array& a) {
  if (a.ndim() != 3 || a.shape(0) != g.nz || a.shape(1) != g.nx || a.shape(2) != g.ny)
    throw ConfigError("array shape must be (nz, nx, ny) of the grid");
  return ScalarField(g, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const ScalarField& f) {
  const GridSpec& g = f.grid();
  Array out({g.nz, g.nx, g.ny});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

HVelocity to_velocity(const GridSpec& g, const Array& u1, const Array& u2) {
  return HVelocity(to_field(g, u1), to_field(g, u2));
}

py::tuple to_arrays(const HVelocity& v) { return py::make_tuple(to_array(v.c1), to_array(v.c2)); }

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ForcingMode parse_mode(const std::string& s) {
  if (s == "exact") return ForcingMode::Exact;
  if (s == "observed") return ForcingMode::Observed;
  throw ConfigError("forcing mode must be exact or observed, got " + s);
}

py::dict report_dict(const GateReport& r) {
  py::dict d;
  d["sup_H2"] = r.sup_H2;
  d["mu"] = r.mu;
  d["delta"] = r.delta;
  d["pass_A"] = r.pass_A;
  d["pass_gate1"] = r.pass_gate1;
  d["pass_gate2"] = r.pass_gate2;
  d["margin_A"] = r.margin_A;
  d["margin_gate1"] = r.margin_gate1;
  d["margin_gate2"] = r.margin_gate2;
  d["pass"] = r.pass();
  return d;
}

int run_command(const std::string& command, const std::string& config_path,
                std::optional<std::string> out, std::optional<std::uint64_t> seed,
                std::optional<std::string> which, bool quiet) {
  std::ostringstream err;
  const int code = cli::guarded(
      [&] {
        cli::ExperimentConfig c = cli::load_config(config_path);
        if (seed) c.reseed(*seed);
        if (out) c.output_dir = *out;
        const cli::RunContext ctx{quiet, nullptr};
        if (command == "run-reference") return cli::cmd_run_reference(c, ctx);
        if (command == "twin") return cli::cmd_twin(c, ctx);
        if (command == "sweep") return cli::cmd_sweep(c, ctx);
        if (command == "check") {
          const std::string w = which.value_or("");
          if (w == "observation") return cli::cmd_check(c, cli::CheckKind::Observation, ctx);
          if (w == "coercivity") return cli::cmd_check(c, cli::CheckKind::Coercivity, ctx);
          if (w == "gates") return cli::cmd_check(c, cli::CheckKind::Gates, ctx);
          throw ConfigError("check needs which = observation, coercivity or gates");
        }
        throw ConfigError("unknown command " + command);
      },
      err);
  if (code != cli::kExitOk && !quiet) std::cerr << err.str();
  return code;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nudging data assimilation for the hydrostatic Navier-Stokes equations";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<ConstraintError>(m, "ConstraintError", base.ptr());
  py::register_exception<SymmetryError>(m, "SymmetryError", base.ptr());

  py::class_<GridSpec>(m, "Grid")
      .def(py::init([](int nx, int ny, int nz, double l, double lx, double ly) {
             GridSpec g;
             g.nx = nx;
             g.ny = ny;
             g.nz = nz;
             g.l = l;
             g.lx = lx;
             g.ly = ly;
             g.validate();
             return g;
           }),
           py::arg("nx") = 32, py::arg("ny") = 32, py::arg("nz") = 17, py::arg("l") = 1.0,
           py::arg("lx") = 2.0 * std::numbers::pi, py::arg("ly") = 2.0 * std::numbers::pi)
      .def_readonly("nx", &GridSpec::nx)
      .def_readonly("ny", &GridSpec::ny)
      .def_readonly("nz", &GridSpec::nz)
      .def_readonly("l", &GridSpec::l)
      .def_readonly("lx", &GridSpec::lx)
      .def_readonly("ly", &GridSpec::ly)
      .def_property_readonly("shape", [](const GridSpec& g) { return py::make_tuple(g.nz, g.nx, g.ny); })
      .def("coordinates", [](const GridSpec& g) {
        const ScalarField x = sample(g, [](double x, double, double) { return x; });
        const ScalarField y = sample(g, [](double, double y, double) { return y; });
        const ScalarField z = sample(g, [](double, double, double z) { return z; });
        return py::make_tuple(to_array(x), to_array(y), to_array(z));
      }, "Node coordinates (x1, x2, x3), each of shape (nz, nx, ny).");

  py::class_<ObservationOp>(m, "Observation")
      .def_static("identity", &ObservationOp::identity)
      .def_static("cutoff", &ObservationOp::spectral_cutoff, py::arg("K"))
      .def_static("local_average", &ObservationOp::local_average, py::arg("h"))
      .def_property_readonly("delta", &ObservationOp::delta)
      .def_property_readonly("kind", [](const ObservationOp& J) { return std::string(to_string(J.kind)); })
      .def("__call__", [](const ObservationOp& J, const GridSpec& g, const Array& f) {
        J.validate(g);
        return to_array(observe(J, to_field(g, f)));
      }, py::arg("grid"), py::arg("f"));

  py::class_<GateConstants>(m, "GateConstants")
      .def(py::init<>())
      .def_readwrite("c0", &GateConstants::c0)
      .def_readwrite("c1", &GateConstants::c1)
      .def_readwrite("c_gate1", &GateConstants::c_gate1)
      .def_readwrite("c_gate1_delta", &GateConstants::c_gate1_delta)
      .def_readwrite("c_gate2", &GateConstants::c_gate2);

  m.def("project", [](const GridSpec& g, const Array& u1, const Array& u2) {
    return to_arrays(project(to_velocity(g, u1, u2)).velocity());
  }, py::arg("grid"), py::arg("u1"), py::arg("u2"),
        "Hydrostatic Helmholtz projection of (u1, u2).");
  m.def("div_constraint", [](const GridSpec& g, const Array& u1, const Array& u2) {
    return check_div_constraint(to_velocity(g, u1, u2));
  }, py::arg("grid"), py::arg("u1"), py::arg("u2"),
        "L2 norm of the horizontal divergence of the depth average.");
  m.def("norms", [](const GridSpec& g, const Array& u1, const Array& u2) {
    const HVelocity v = to_velocity(g, u1, u2);
    return py::make_tuple(norm(v, NormOrder::L2), norm(v, NormOrder::H1), norm(v, NormOrder::H2));
  }, py::arg("grid"), py::arg("u1"), py::arg("u2"), "(L2, H1, H2) norms.");
  m.def("axiom_constants", [](const ObservationOp& J, const GridSpec& g, std::uint64_t seed) {
    ProbeSuite s;
    s.seed = seed;
    const AxiomConstants a = estimate_constants(J, g, s);
    py::dict d;
    d["c_bound"] = a.c_bound;
    d["c_approx"] = a.c_approx;
    d["n_probes"] = a.n_probes;
    return d;
  }, py::arg("J"), py::arg("grid"), py::arg("seed") = 20240601);
  m.def("check_gates", [](double sup_h2, double mu, double delta, const GateConstants& gc) {
    gc.validate();
    return report_dict(check_gates(sup_h2, mu, delta, gc));
  }, py::arg("sup_H2"), py::arg("mu"), py::arg("delta"), py::arg("constants") = GateConstants{});
  m.def("smallest_passing_mu", &smallest_passing_mu, py::arg("sup_H2"), py::arg("delta"),
        py::arg("constants") = GateConstants{});

  py::class_<cli::ExperimentConfig>(m, "Config")
      .def_readwrite("output_dir", &cli::ExperimentConfig::output_dir)
      .def_readonly("seed", &cli::ExperimentConfig::seed)
      .def_property_readonly("grid", [](const cli::ExperimentConfig& c) { return c.sim.grid; })
      .def_property_readonly("observation", [](const cli::ExperimentConfig& c) { return c.observation; })
      .def_property_readonly("mu", [](const cli::ExperimentConfig& c) { return c.nudge.mu; })
      .def("reseed", &cli::ExperimentConfig::reseed, py::arg("seed"))
      .def("canonical_json", &cli::ExperimentConfig::canonical_json)
      .def("hash", &cli::ExperimentConfig::hash);
  m.def("load_config", &cli::load_config, py::arg("path"));
  m.def("parse_config", &cli::parse_config, py::arg("text"), py::arg("source") = "<string>");

  py::class_<SpinUpResult>(m, "SpinUp")
      .def_property_readonly("times", [](const SpinUpResult& s) { return to_array(s.times); })
      .def_property_readonly("l2", [](const SpinUpResult& s) { return to_array(s.l2); })
      .def_property_readonly("h2", [](const SpinUpResult& s) { return to_array(s.h2); })
      .def_readonly("sup_h2", &SpinUpResult::sup_h2)
      .def_readonly("tail_sup_h2", &SpinUpResult::tail_sup_h2)
      .def_property_readonly("t", [](const SpinUpResult& s) { return s.state.t; })
      .def_property_readonly("velocity", [](const SpinUpResult& s) { return to_arrays(s.state.v.velocity()); });
  m.def("spin_up", &cli::spin_up_reference, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  m.def("twin", [](const cli::ExperimentConfig& c, const SpinUpResult& ref, std::optional<double> mu,
                   std::optional<ObservationOp> J, const std::string& mode) {
    cli::TwinOutcome o;
    {
      py::gil_scoped_release release;
      o = cli::twin_experiment(c, ref, mu.value_or(c.nudge.mu), J.value_or(c.observation),
                               parse_mode(mode));
    }
    const TwinRecord& r = o.record;
    py::dict d;
    d["times"] = to_array(r.times);
    d["err_L2"] = to_array(r.err_L2);
    d["err_H1"] = to_array(r.err_H1);
    d["err_H2"] = to_array(r.err_H2);
    d["nudge_mag"] = to_array(r.nudge_mag);
    d["budget_residual"] = to_array(r.budget_residual);
    d["summary"] = cli::twin_summary(c, o).dump();
    return d;
  }, py::arg("config"), py::arg("reference"), py::arg("mu") = py::none(), py::arg("J") = py::none(),
        py::arg("mode") = "exact");

  m.def("run", &run_command, py::arg("command"), py::arg("config"), py::arg("out") = py::none(),
        py::arg("seed") = py::none(), py::arg("which") = py::none(), py::arg("quiet") = true,
        py::call_guard<py::gil_scoped_release>(),
        "Runs a driver subcommand and returns its exit code.");
}
