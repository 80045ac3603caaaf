#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <string>

#include "gridrank/betweenness.hpp"
#include "gridrank/case.hpp"
#include "gridrank/error.hpp"
#include "gridrank/graph.hpp"
#include "gridrank/stats.hpp"
#include "gridrank/transient.hpp"

namespace py = pybind11;
using namespace gridrank;

namespace {

CostScalar parse_cost(const std::string& text) {
  const auto c = cost_scalar_from_string(text);
  if (!c) throw py::value_error("cost must be 'magnitude' or 'reactance'");
  return *c;
}

Accumulation parse_accumulation(const std::string& text) {
  if (text == "per-path") return Accumulation::per_path;
  if (text == "per-pair") return Accumulation::per_pair;
  throw py::value_error("accumulation must be 'per-path' or 'per-pair'");
}

AnalysisOptions analysis_options(const std::string& cost, double pf_tol, int max_iter) {
  AnalysisOptions o;
  o.graph.cost = parse_cost(cost);
  o.power_flow.tol = pf_tol;
  o.power_flow.max_iter = max_iter;
  return o;
}

BetweennessOptions betweenness_options(double margin, double tie_tol, const std::string& accumulation,
                                       std::size_t max_paths) {
  BetweennessOptions o;
  o.margin = margin;
  o.paths.tie_tol = tie_tol;
  o.paths.max_paths = max_paths;
  o.accumulation = parse_accumulation(accumulation);
  return o;
}

py::list report_rows(const BetweennessReport& r) {
  py::list out;
  for (const auto& l : r.lines) {
    py::dict d;
    d["from"] = l.from;
    d["to"] = l.to;
    d["raw"] = l.raw;
    d["normalized"] = l.normalized;
    d["rank"] = l.rank;
    d["critical"] = l.critical;
    out.append(d);
  }
  return out;
}

py::dict analyse(const SystemCase& c, const std::string& cost, double pf_tol, int max_iter) {
  const auto a = analyse_case(c, analysis_options(cost, pf_tol, max_iter));
  py::dict out;
  out["converged"] = a.solution.converged;
  out["iterations"] = a.solution.iterations;
  out["max_mismatch"] = a.solution.max_mismatch;
  py::list buses;
  for (std::size_t i = 0; i < a.solution.bus_ids.size(); ++i) {
    py::dict b;
    b["id"] = a.solution.bus_ids[i];
    b["v_mag"] = a.solution.v_mag[i];
    b["v_ang"] = a.solution.v_ang[i];
    b["p_inj"] = a.solution.p_inj[i];
    b["q_inj"] = a.solution.q_inj[i];
    buses.append(b);
  }
  out["buses"] = buses;
  py::list edges;
  for (const auto& e : a.graph.edges) {
    py::dict d;
    d["from"] = e.from;
    d["to"] = e.to;
    d["r"] = e.complex_weight.real();
    d["x"] = e.complex_weight.imag();
    d["cost"] = e.cost;
    d["p_flow"] = e.p_flow;
    edges.append(d);
  }
  out["edges"] = edges;
  py::list idle;
  for (const auto& l : a.graph.idle) idle.append(py::make_tuple(l.a, l.b));
  out["idle"] = idle;
  out["sources"] = a.graph.source_ids();
  return out;
}

py::dict stats(const SystemCase& c) {
  const auto a = analyse_case(c);
  const auto s = compute_stats(topology_view(c), a.graph);
  py::dict out;
  out["nodes"] = s.node_count;
  out["edges"] = s.edge_count;
  out["average_degree"] = s.average_degree;
  out["hub"] = s.degrees.hub;
  out["clustering"] = s.clustering.graph;
  out["characteristic_path_length"] = s.paths.char_path_length;
  out["diameter"] = s.paths.diameter;
  out["diameter_pairs"] = s.paths.diameter_pair_count;
  py::dict deg;
  for (std::size_t i = 0; i < s.degrees.ids.size(); ++i) {
    deg[py::int_(s.degrees.ids[i])] =
        py::make_tuple(s.degrees.degree[i], s.degrees.in_degree[i], s.degrees.out_degree[i]);
  }
  out["degrees"] = deg;
  return out;
}

py::dict rank(const SystemCase& c, double margin, double tie_tol, const std::string& cost,
              const std::string& accumulation, std::size_t max_paths) {
  const auto a = analyse_case(c, analysis_options(cost, 1e-8, 50));
  const auto r = rank_lines(a.graph, betweenness_options(margin, tie_tol, accumulation, max_paths));
  py::dict out;
  out["total_paths"] = r.paths.total_paths;
  out["proposed"] = report_rows(r.proposed);
  out["past"] = report_rows(r.past);
  return out;
}

py::list sensitivity(const SystemCase& c, int from_bus, int to_bus, double margin, double tie_tol,
                     const std::string& cost) {
  const auto rep = sensitivity_shift_generator(c, from_bus, to_bus, analysis_options(cost, 1e-8, 50),
                                               betweenness_options(margin, tie_tol, "per-path", 1'000'000));
  return report_rows(rep);
}

py::dict simulate_line(const SystemCase& c, std::pair<int, int> line, double t_clear, double t_end, double dt,
                       double threshold, const std::optional<std::string>& machines, const std::string& fault_end) {
  if (fault_end != "from" && fault_end != "to") throw py::value_error("fault_end must be 'from' or 'to'");
  const auto a = analyse_case(c);
  const auto branch = find_branch(a.merged, line.first, line.second);
  if (!branch) {
    throw ValidationError("no line " + std::to_string(line.first) + "-" + std::to_string(line.second));
  }
  const auto params = machines ? load_machine_file(*machines, a.merged.base_mva)
                               : default_machines(a.merged, a.solution);
  const auto tr = simulate_fault(a.merged, a.solution, params, *branch,
                                 fault_end == "from" ? FaultEnd::from : FaultEnd::to,
                                 SimOptions{t_clear, t_end, dt, threshold});
  py::dict out;
  out["verdict"] = std::string(to_string(tr.verdict));
  out["first_divergence_time"] = tr.first_divergence_time;
  out["max_excursion"] = tr.max_excursion;
  out["islanded"] = tr.islanded;
  out["machine_bus"] = tr.machine_bus;
  out["slack_bus"] = tr.machine_bus[tr.slack_machine];
  out["times"] = tr.times;
  py::dict rel;
  for (std::size_t i = 0; i < tr.machine_bus.size(); ++i) {
    std::vector<double> r(tr.times.size());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = tr.relative_angle(i, k);
    rel[py::int_(tr.machine_bus[i])] = r;
  }
  out["relative_angle"] = rel;
  return out;
}

}  // namespace

PYBIND11_MODULE(_gridrank, m) {
  m.doc() = "Power-weighted line betweenness and transient screening";

  static py::exception<Error> base(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<SchemaError>(m, "SchemaError", base);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<SingularError>(m, "SingularError", base);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base);
  py::register_exception<MappingError>(m, "MappingError", base);
  py::register_exception<ResourceError>(m, "ResourceError", base);
  py::register_exception<DisconnectedError>(m, "DisconnectedError", base);

  py::class_<SystemCase>(m, "Case")
      .def_static("from_file", [](const std::string& path) { return load_case_file(path); }, py::arg("path"))
      .def_static("from_cdf", [](const std::string& text) { return parse_cdf(text); }, py::arg("text"))
      .def_static("from_json", [](const std::string& text) { return parse_case_native(text); }, py::arg("text"))
      .def("to_json", [](const SystemCase& c) { return emit_case_native(c); })
      .def_readonly("name", &SystemCase::name)
      .def_readonly("base_mva", &SystemCase::base_mva)
      .def_property_readonly("bus_ids",
                             [](const SystemCase& c) {
                               std::vector<int> ids;
                               for (const auto& b : c.buses) ids.push_back(b.id);
                               return ids;
                             })
      .def_property_readonly("branch_count", [](const SystemCase& c) { return c.branches.size(); })
      .def("shift_generator", &shift_generator, py::arg("from_bus"), py::arg("to_bus"))
      .def("__eq__", [](const SystemCase& a, const SystemCase& b) { return a == b; })
      .def("__repr__", [](const SystemCase& c) {
        return "<Case '" + c.name + "' buses=" + std::to_string(c.buses.size()) +
               " branches=" + std::to_string(c.branches.size()) + ">";
      });

  m.def("analyse", &analyse, py::arg("case"), py::arg("cost") = "magnitude", py::arg("pf_tol") = 1e-8,
        py::arg("max_iter") = 50, "Power flow and directed flow graph.");
  m.def("stats", &stats, py::arg("case"), "Degree, clustering and path-length statistics.");
  m.def("rank", &rank, py::arg("case"), py::arg("margin") = 0.5, py::arg("tie_tol") = 1e-9,
        py::arg("cost") = "magnitude", py::arg("accumulation") = "per-path", py::arg("max_paths") = 1'000'000,
        "Proposed and past betweenness rankings.");
  m.def("sensitivity", &sensitivity, py::arg("case"), py::arg("from_bus"), py::arg("to_bus"),
        py::arg("margin") = 0.5, py::arg("tie_tol") = 1e-9, py::arg("cost") = "magnitude",
        "Proposed ranking after moving generation between buses.");
  m.def("simulate", &simulate_line, py::arg("case"), py::arg("line"), py::arg("t_clear") = 1.0,
        py::arg("t_end") = 10.0, py::arg("dt") = 1e-3, py::arg("threshold") = std::numbers::pi,
        py::arg("machines") = py::none(), py::arg("fault_end") = "from",
        "Fault one end of a line, clear by removing it, integrate the swing equations.");
}
