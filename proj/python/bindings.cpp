#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "feederflow/io.hpp"

namespace py = pybind11;
using namespace feederflow;

namespace {

BuildOptions make_build_options(double epsilon, const std::string& mode, bool ideal_svr) {
  BuildOptions b;
  b.epsilon_rel = epsilon;
  if (mode == "resistive") {
    b.mode = EpsilonMode::Resistive;
  } else if (mode == "reactive") {
    b.mode = EpsilonMode::Reactive;
  } else {
    throw py::value_error("mode must be 'resistive' or 'reactive'");
  }
  b.ideal_svr = ideal_svr;
  return b;
}

Phase parse_phase(const std::string& p) {
  if (p == "a") return Phase::A;
  if (p == "b") return Phase::B;
  if (p == "c") return Phase::C;
  throw py::value_error("phase must be 'a', 'b', or 'c'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Three-phase feeder Y-Bus construction and Z-Bus load flow";

  py::register_exception<ParseError>(m, "FeederParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "FeederValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalFailure", PyExc_RuntimeError);

  py::class_<Feeder>(m, "Feeder")
      .def_readonly("name", &Feeder::name)
      .def_readonly("slack_id", &Feeder::slack_id)
      .def_property_readonly("bus_ids",
                             [](const Feeder& f) {
                               std::vector<std::string> ids;
                               for (const Bus& b : f.buses) ids.push_back(b.id);
                               return ids;
                             })
      .def_property_readonly("edge_ids",
                             [](const Feeder& f) {
                               std::vector<std::string> ids;
                               for (const Edge& e : f.edges) ids.push_back(e.id);
                               return ids;
                             })
      .def("bus_phases",
           [](const Feeder& f, const std::string& id) { return f.bus(id).phases.str(); })
      .def("__repr__", [](const Feeder& f) {
        return "<Feeder '" + f.name + "': " + std::to_string(f.buses.size()) + " buses, " +
               std::to_string(f.edges.size()) + " edges>";
      });

  py::class_<PhaseIndexMap>(m, "PhaseIndexMap")
      .def_property_readonly("size", &PhaseIndexMap::size)
      .def("index_of",
           [](const PhaseIndexMap& map, const Feeder& f, const std::string& bus,
              const std::string& phase) {
             return map.index_of(f.bus_position(bus), parse_phase(phase));
           })
      .def("locate", [](const PhaseIndexMap& map, const Feeder& f, int j) {
        auto [bus, phase] = map.locate(j);
        return py::make_tuple(f.buses[static_cast<size_t>(bus)].id,
                              std::string(1, phase_char(phase)));
      });

  py::class_<SolverResult>(m, "SolverResult")
      .def_readonly("v", &SolverResult::v)
      .def_readonly("iterations", &SolverResult::iterations)
      .def_readonly("residual_inf", &SolverResult::residual_inf)
      .def_readonly("converged", &SolverResult::converged)
      .def_readonly("i_slack", &SolverResult::i_slack)
      .def("__repr__", [](const SolverResult& r) {
        return std::string("<SolverResult ") + (r.converged ? "converged" : "NOT converged") +
               " in " + std::to_string(r.iterations) +
               " iterations, residual=" + std::to_string(r.residual_inf) + ">";
      });

  py::class_<AssumptionCheck>(m, "AssumptionCheck")
      .def_readonly("name", &AssumptionCheck::name)
      .def_readonly("passed", &AssumptionCheck::pass)
      .def_readonly("detail", &AssumptionCheck::detail);

  py::class_<Diagnostics>(m, "Diagnostics")
      .def_readonly("symmetry_defect", &Diagnostics::symmetry_defect)
      .def_readonly("definiteness_eig", &Diagnostics::definiteness_eig)
      .def_readonly("sigma_min_y", &Diagnostics::sigma_min_y)
      .def_readonly("sigma_max_y", &Diagnostics::sigma_max_y)
      .def_readonly("sigma_min_yyl", &Diagnostics::sigma_min_yyl)
      .def_readonly("sigma_max_yyl", &Diagnostics::sigma_max_yyl)
      .def_readonly("rank_y", &Diagnostics::rank_y)
      .def_readonly("rank_yyl", &Diagnostics::rank_yyl)
      .def_readonly("dimension", &Diagnostics::dimension)
      .def_readonly("structural_pass", &Diagnostics::structural_pass)
      .def_readonly("ledger", &Diagnostics::ledger);

  m.def("parse_feeder", [](const std::filesystem::path& p) { return parse_feeder(p); },
        py::arg("path"), "Parse and validate a feeder description file");
  m.def("parse_feeder_string", &parse_feeder_string, py::arg("text"));
  m.def("serialize_feeder", &serialize_feeder, py::arg("feeder"));
  m.def("build_index", &PhaseIndexMap::build, py::arg("feeder"));

  m.def(
      "assemble",
      [](const Feeder& f, double epsilon, const std::string& mode, bool ideal_svr) {
        PhaseIndexMap index = PhaseIndexMap::build(f);
        YBusPartition part = assemble(f, index, make_build_options(epsilon, mode, ideal_svr));
        py::dict out;
        out["Y"] = part.dense_y(index);
        out["Y_NS"] = part.dense_ns(index);
        out["Y_SN"] = part.dense_sn(index);
        out["Y_SS"] = Mat(part.ss);
        return out;
      },
      py::arg("feeder"), py::arg("epsilon") = 1e-6, py::arg("mode") = "resistive",
      py::arg("ideal_svr") = false,
      "Assemble the partitioned bus admittance matrix as dense arrays");

  m.def(
      "load_admittance",
      [](const Feeder& f) {
        PhaseIndexMap index = PhaseIndexMap::build(f);
        return assemble_load_admittance(f, index).to_dense(index);
      },
      py::arg("feeder"), "Block-diagonal constant-impedance load admittance");

  m.def(
      "check",
      [](const Feeder& f, double epsilon, const std::string& mode) {
        PhaseIndexMap index = PhaseIndexMap::build(f);
        BuildOptions build = make_build_options(epsilon, mode, false);
        YBusPartition part = assemble(f, index, build);
        LoadAdmittance load = assemble_load_admittance(f, index);
        return check_invertibility(f, index, part, load, build);
      },
      py::arg("feeder"), py::arg("epsilon") = 1e-6, py::arg("mode") = "resistive",
      "Run the structural diagnostics ledger");

  m.def(
      "solve",
      [](const Feeder& f, double epsilon, const std::string& mode, bool ideal_svr, double tol,
         int max_iter) {
        SolverConfig config;
        config.tol = tol;
        config.max_iter = max_iter;
        config.build = make_build_options(epsilon, mode, ideal_svr);
        return solve(f, config);
      },
      py::arg("feeder"), py::arg("epsilon") = 1e-6, py::arg("mode") = "resistive",
      py::arg("ideal_svr") = false, py::arg("tol") = 1e-9, py::arg("max_iter") = 100,
      "Run the Z-Bus fixed-point load flow");

  m.def(
      "residual",
      [](const Feeder& f, const Vec& v, double epsilon, const std::string& mode, bool ideal_svr) {
        SolverConfig config;
        config.build = make_build_options(epsilon, mode, ideal_svr);
        return residual(f, v, config);
      },
      py::arg("feeder"), py::arg("v"), py::arg("epsilon") = 1e-6, py::arg("mode") = "resistive",
      py::arg("ideal_svr") = false, "Current-balance residual (inf norm) at a voltage vector");

  m.def(
      "epsilon_sweep",
      [](const Feeder& f, const std::vector<double>& eps, const std::string& mode,
         bool ideal_svr) {
        SolverConfig config;
        config.build = make_build_options(1e-6, mode, ideal_svr);
        return epsilon_sweep(f, eps, config);
      },
      py::arg("feeder"), py::arg("epsilon_values"), py::arg("mode") = "resistive",
      py::arg("ideal_svr") = false,
      "Solve per epsilon (descending) and report successive |v| differences");

  m.def(
      "voltage_table",
      [](const Feeder& f, const SolverResult& r, double epsilon, const std::string& mode,
         bool ideal_svr, double tol) {
        PhaseIndexMap index = PhaseIndexMap::build(f);
        SolverConfig config;
        config.tol = tol;
        config.build = make_build_options(epsilon, mode, ideal_svr);
        ResultDocument doc = ResultDocument::build(f, index, r, config);
        std::vector<py::tuple> rows;
        for (const auto& row : doc.rows)
          rows.push_back(py::make_tuple(row.bus, std::string(1, phase_char(row.phase)), row.vm_pu,
                                        row.va_deg));
        return rows;
      },
      py::arg("feeder"), py::arg("result"), py::arg("epsilon") = 1e-6,
      py::arg("mode") = "resistive", py::arg("ideal_svr") = false, py::arg("tol") = 1e-9,
      "Deterministically ordered (bus, phase, vm_pu, va_deg) rows, including "
      "regulator internal nodes and the slack bus");

  m.def(
      "regulator_internal_voltages",
      [](const Feeder& f, const Vec& v, double epsilon, const std::string& mode, bool ideal_svr) {
        PhaseIndexMap index = PhaseIndexMap::build(f);
        return recover_regulator_internal_voltages(f, index, v,
                                                   make_build_options(epsilon, mode, ideal_svr));
      },
      py::arg("feeder"), py::arg("v"), py::arg("epsilon") = 1e-6, py::arg("mode") = "resistive",
      py::arg("ideal_svr") = false, "Voltages of the eliminated regulator nodes, keyed by edge id");

  m.def(
      "regulator_ratio",
      [](int tap, const std::string& type) {
        return regulator_ratio(tap, type == "A" ? SvrType::A : SvrType::B);
      },
      py::arg("tap"), py::arg("type") = "B");

  m.def(
      "transformer_matrices",
      [](cx y_t) {
        TransformerMatrices t = transformer_matrices(y_t);
        py::dict out;
        out["Y1"] = Mat(t.y1);
        out["Y2"] = Mat(t.y2);
        out["Y3"] = Mat(t.y3);
        out["Y4"] = Mat(t.y4);
        out["Y5"] = Mat(t.y5);
        out["Y6"] = Mat(t.y6);
        return out;
      },
      py::arg("y_t"));

#ifdef FEEDERFLOW_VERSION
  m.attr("__version__") = FEEDERFLOW_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
