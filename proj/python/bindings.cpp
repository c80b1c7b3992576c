#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smamicro/config.hpp"
#include "smamicro/driver.hpp"
#include "smamicro/lp_simplex.hpp"
#include "smamicro/phase_solver.hpp"
#include "smamicro/run_io.hpp"

namespace py = pybind11;
using namespace smamicro;

namespace {

PhaseProblem make_problem(std::vector<double> unary, const std::vector<std::tuple<int, int, double>>& pairwise,
                          std::vector<std::uint8_t> previous) {
  PhaseProblem p;
  p.unary = std::move(unary);
  for (const auto& [a, b, w] : pairwise) p.pairwise.push_back({a, b, w});
  p.previous = previous.empty() ? PhaseField(p.unary.size(), 0) : std::move(previous);
  p.validate();
  return p;
}

py::dict row_dict(const LedgerRow& r) {
  py::dict d;
  d["k"] = r.k;
  d["t"] = r.t;
  d["a"] = r.a;
  d["E_bulk"] = r.bulk;
  d["E_int1"] = r.interface_constant;
  d["E_int2"] = r.interface_surface;
  d["D_inc"] = r.dissipation_increment;
  d["Diss_cum"] = r.dissipation_cumulative;
  d["frac_z1"] = r.fraction_first;
  d["flips"] = r.flips;
  d["sweeps"] = r.sweeps;
  d["status"] = r.status;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-variant shape-memory microstructure simulator";

  py::enum_<Preset>(m, "Preset")
      .value("example1", Preset::example1)
      .value("example2", Preset::example2)
      .value("custom", Preset::custom);
  py::enum_<BoundaryKind>(m, "BoundaryKind")
      .value("clamped", BoundaryKind::clamped)
      .value("sheared_ribbon", BoundaryKind::sheared_ribbon);
  py::enum_<Variant>(m, "Variant").value("first", Variant::first).value("second", Variant::second);
  py::enum_<ExitCode>(m, "ExitCode")
      .value("ok", ExitCode::ok)
      .value("config_error", ExitCode::config_error)
      .value("solver_stall", ExitCode::solver_stall)
      .value("contract_violation", ExitCode::contract_violation)
      .value("io_error", ExitCode::io_error)
      .value("diagnostics_failed", ExitCode::diagnostics_failed);

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

  py::class_<Mesh2D>(m, "Mesh2D")
      .def_static("structured", &Mesh2D::structured, py::arg("nx"), py::arg("ny"), py::arg("width") = 2.0,
                  py::arg("height") = 1.0)
      .def_property_readonly("nx", &Mesh2D::nx)
      .def_property_readonly("ny", &Mesh2D::ny)
      .def_property_readonly("num_nodes", &Mesh2D::num_nodes)
      .def_property_readonly("num_triangles", &Mesh2D::num_triangles)
      .def_property_readonly("num_edges", &Mesh2D::num_edges)
      .def_property_readonly("num_interior_edges", [](const Mesh2D& mesh) { return mesh.interior_edges().size(); })
      .def_property_readonly("nodes",
                             [](const Mesh2D& mesh) {
                               Eigen::MatrixX2d out(mesh.num_nodes(), 2);
                               for (int n = 0; n < mesh.num_nodes(); ++n) out.row(n) = mesh.nodes()[n].transpose();
                               return out;
                             })
      .def_property_readonly("triangles", &Mesh2D::triangles)
      .def_property_readonly("areas", &Mesh2D::areas)
      .def("total_area", &Mesh2D::total_area)
      .def("layer_of", &Mesh2D::layer_of)
      .def("boundary_counts",
           [](const Mesh2D& mesh, BoundaryKind kind) {
             const NodeSets s = mesh.classify_boundary(kind);
             return py::dict(py::arg("dirichlet") = s.dirichlet.size(), py::arg("periodic") = s.periodic.size(),
                             py::arg("free") = s.free.size());
           });

  py::class_<MaterialParams>(m, "MaterialParams")
      .def(py::init<>())
      .def_readwrite("alpha", &MaterialParams::alpha)
      .def_readwrite("delta1", &MaterialParams::delta1)
      .def_readwrite("delta2", &MaterialParams::delta2)
      .def_readwrite("epsilon", &MaterialParams::epsilon)
      .def_readwrite("beta", &MaterialParams::beta)
      .def_readwrite("alpha_i", &MaterialParams::alpha_i)
      .def_readwrite("alpha_s", &MaterialParams::alpha_s)
      .def("validate", &MaterialParams::validate);

  py::class_<Material>(m, "Material")
      .def(py::init<const MaterialParams&>())
      .def_property_readonly("params", &Material::params)
      .def("stretch", &Material::stretch);

  m.def("mooney_rivlin", &mooney_rivlin, py::arg("F"), py::arg("params") = MaterialParams{},
        "Density value, or None when det F <= 0.");
  m.def("variant_density", &variant_density, py::arg("F"), py::arg("variant"), py::arg("material"));
  m.def("variant_density_gradient", &variant_density_gradient, py::arg("F"), py::arg("variant"),
        py::arg("material"));
  m.def("edge_stretch", &edge_stretch, py::arg("F"), py::arg("tangent"));

  m.def(
      "solve_phase",
      [](std::vector<double> unary, const std::vector<std::tuple<int, int, double>>& pairwise,
         std::vector<std::uint8_t> previous) {
        return solve_phase(make_problem(std::move(unary), pairwise, std::move(previous)));
      },
      py::arg("unary"), py::arg("pairwise") = std::vector<std::tuple<int, int, double>>{},
      py::arg("previous") = std::vector<std::uint8_t>{});
  m.def(
      "phase_objective",
      [](std::vector<double> unary, const std::vector<std::tuple<int, int, double>>& pairwise,
         const PhaseField& z) { return phase_objective(make_problem(std::move(unary), pairwise, {}), z); },
      py::arg("unary"), py::arg("pairwise"), py::arg("z"));
  m.def(
      "lp_relaxation_check",
      [](std::vector<double> unary, const std::vector<std::tuple<int, int, double>>& pairwise,
         const PhaseField& z) {
        const LpRelaxationReport r = lp_relaxation_check(make_problem(std::move(unary), pairwise, {}), z);
        py::dict d;
        d["candidate_objective"] = r.candidate_objective;
        d["lp_objective"] = r.lp_objective;
        d["dual_bound"] = r.dual_bound;
        d["duality_gap"] = r.duality_gap;
        d["lp_integral"] = r.lp_integral;
        d["sigma_identity"] = r.sigma_identity;
        d["candidate_optimal"] = r.candidate_optimal;
        d["lp_z"] = r.lp_z;
        d["lp_sigma"] = r.lp_sigma;
        return d;
      },
      py::arg("unary"), py::arg("pairwise"), py::arg("z"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_static("for_preset", &RunConfig::for_preset)
      .def_readwrite("preset", &RunConfig::preset)
      .def_readwrite("nx", &RunConfig::nx)
      .def_readwrite("ny", &RunConfig::ny)
      .def_readwrite("material", &RunConfig::material)
      .def_readwrite("t_final", &RunConfig::t_final)
      .def_readwrite("n_steps", &RunConfig::n_steps)
      .def_readwrite("boundary", &RunConfig::boundary)
      .def_readwrite("load_scale", &RunConfig::load_scale)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("elastic_tol", &RunConfig::elastic_tol)
      .def_readwrite("sweep_rel_tol", &RunConfig::sweep_rel_tol)
      .def_readwrite("max_sweeps", &RunConfig::max_sweeps)
      .def_readwrite("competitor_search", &RunConfig::competitor_search)
      .def_readwrite("output", &RunConfig::output)
      .def_readwrite("emit_snapshots", &RunConfig::emit_snapshots)
      .def_readwrite("run_diagnostics", &RunConfig::run_diagnostics)
      .def("validate", &RunConfig::validate)
      .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; });

  m.def("parse_config", [](const std::string& text) { return parse_config_text(text, "<string>"); },
        py::arg("text"));
  m.def("serialize_config", &serialize_config, py::arg("config"));

  m.def(
      "run",
      [](const RunConfig& config) {
        config.validate();
        const Simulation sim(config.to_setup());
        Trajectory traj;
        {
          py::gil_scoped_release release;
          traj = sim.run();
        }
        py::list rows;
        py::list phases;
        py::list positions;
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
          rows.append(row_dict(traj.ledger[k]));
          phases.append(traj.states[k].z);
          positions.append(Eigen::MatrixX2d(traj.states[k].y.transpose()));
        }
        return py::dict(py::arg("ledger") = rows, py::arg("z") = phases, py::arg("y") = positions,
                        py::arg("complete") = traj.complete);
      },
      py::arg("config"), "Runs the simulation in memory; returns ledger rows, phase fields and positions.");
  m.def(
      "run_to_directory",
      [](const RunConfig& config) {
        std::ostringstream log;
        ExitCode code;
        {
          py::gil_scoped_release release;
          code = run_to_directory(config, log);
        }
        return py::make_tuple(code, log.str());
      },
      py::arg("config"));
  m.def(
      "diagnose_directory",
      [](const std::string& dir) {
        std::ostringstream log;
        ExitCode code;
        {
          py::gil_scoped_release release;
          code = diagnose_directory(dir, log);
        }
        return py::make_tuple(code, log.str());
      },
      py::arg("run_dir"));
}
