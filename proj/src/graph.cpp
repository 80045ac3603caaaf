#include "gridrank/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "gridrank/error.hpp"

namespace gridrank {

std::string_view to_string(CostScalar cost) {
  return cost == CostScalar::magnitude ? "magnitude" : "reactance";
}

std::optional<CostScalar> cost_scalar_from_string(std::string_view text) {
  if (text == "magnitude") return CostScalar::magnitude;
  if (text == "reactance") return CostScalar::reactance;
  return std::nullopt;
}

std::optional<std::size_t> FlowGraph::node_index(int id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return i;
  }
  return std::nullopt;
}

const FlowEdge* FlowGraph::find_edge(int from, int to) const {
  const auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{from, to},
                                   [](const FlowEdge& e, const std::pair<int, int>& key) {
                                     return std::pair{e.from, e.to} < key;
                                   });
  if (it != edges.end() && it->from == from && it->to == to) return &*it;
  return nullptr;
}

std::vector<int> FlowGraph::source_ids() const {
  std::vector<int> out;
  for (const auto& n : nodes) {
    if (n.source) out.push_back(n.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> source_nodes(const SystemCase& system) {
  std::vector<int> out;
  for (const auto& bus : system.buses) {
    if (bus.kind == BusKind::slack || bus.p_gen > 0.0) out.push_back(bus.id);
  }
  if (out.empty()) throw ValidationError("case has no generator source");
  std::sort(out.begin(), out.end());
  return out;
}

double edge_cost(const BranchRecord& br, CostScalar cost) {
  const double mag = std::hypot(br.r, br.x);
  if (cost == CostScalar::reactance && br.x != 0.0) return std::abs(br.x);
  return mag;
}

FlowGraph build_flow_graph(const SystemCase& system, std::span<const BranchFlow> flows,
                           const GraphOptions& options) {
  if (flows.size() != system.branches.size()) {
    throw MappingError("got " + std::to_string(flows.size()) + " flows for " +
                       std::to_string(system.branches.size()) + " branches");
  }
  FlowGraph g;
  const auto sources = source_nodes(system);
  for (const auto& bus : system.buses) {
    g.nodes.push_back({bus.id, std::binary_search(sources.begin(), sources.end(), bus.id)});
  }

  std::set<std::pair<int, int>> pairs;
  for (std::size_t k = 0; k < flows.size(); ++k) {
    const auto& br = system.branches[k];
    const auto& fl = flows[k];
    const auto label = std::to_string(br.from_bus) + "-" + std::to_string(br.to_bus);
    if (fl.from_bus != br.from_bus || fl.to_bus != br.to_bus) {
      throw MappingError("flow " + std::to_string(k) + " does not belong to branch " + label);
    }
    if (!pairs.insert({std::min(br.from_bus, br.to_bus), std::max(br.from_bus, br.to_bus)}).second) {
      throw MappingError("branch " + label + " is parallel to another; merge parallels first");
    }
    const std::complex<double> z(br.r, br.x);
    if (std::abs(fl.p_send) <= options.dead_band) {
      g.idle.push_back({br.from_bus, br.to_bus, k, z});
      continue;
    }
    FlowEdge e;
    e.branch_index = k;
    e.complex_weight = z;
    e.cost = edge_cost(br, options.cost);
    if (fl.p_send > 0.0) {
      e.from = br.from_bus;
      e.to = br.to_bus;
      e.p_flow = fl.p_send;
    } else {
      e.from = br.to_bus;
      e.to = br.from_bus;
      e.p_flow = fl.p_recv;
    }
    g.edges.push_back(e);
  }
  std::sort(g.edges.begin(), g.edges.end(),
            [](const FlowEdge& a, const FlowEdge& b) { return std::pair{a.from, a.to} < std::pair{b.from, b.to}; });
  return g;
}

std::size_t Topology::simple_edge_count() const {
  std::size_t twice = 0;
  for (const auto& n : neighbours) twice += n.size();
  return twice / 2;
}

namespace {

Topology make_topology(std::vector<int> ids, const std::vector<std::pair<int, int>>& links) {
  Topology t;
  t.ids = std::move(ids);
  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < t.ids.size(); ++i) index[t.ids[i]] = i;
  t.neighbours.resize(t.ids.size());
  t.link_degree.assign(t.ids.size(), 0);
  for (const auto& [a, b] : links) {
    const auto ia = index.at(a), ib = index.at(b);
    t.neighbours[ia].push_back(ib);
    t.neighbours[ib].push_back(ia);
    ++t.link_degree[ia];
    ++t.link_degree[ib];
  }
  for (auto& n : t.neighbours) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  t.link_count = links.size();
  return t;
}

}  // namespace

Topology undirected_view(const FlowGraph& graph) {
  std::vector<int> ids;
  for (const auto& n : graph.nodes) ids.push_back(n.id);
  std::vector<std::pair<int, int>> links;
  for (const auto& e : graph.edges) links.emplace_back(e.from, e.to);
  for (const auto& l : graph.idle) links.emplace_back(l.a, l.b);
  return make_topology(std::move(ids), links);
}

Topology topology_view(const SystemCase& system) {
  std::vector<int> ids;
  for (const auto& b : system.buses) ids.push_back(b.id);
  std::vector<std::pair<int, int>> links;
  for (const auto& br : system.branches) links.emplace_back(br.from_bus, br.to_bus);
  return make_topology(std::move(ids), links);
}

std::string export_edge_list(const FlowGraph& graph) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "# nodes %zu edges %zu idle %zu\n", graph.nodes.size(), graph.edges.size(),
                graph.idle.size());
  out += line;
  out += "# node source\n";
  for (const auto& n : graph.nodes) {
    std::snprintf(line, sizeof line, "%d %d\n", n.id, n.source ? 1 : 0);
    out += line;
  }
  out += "# from to r x cost p_flow\n";
  for (const auto& e : graph.edges) {
    std::snprintf(line, sizeof line, "%d %d %.6f %.6f %.6f %.6f\n", e.from, e.to, e.complex_weight.real(),
                  e.complex_weight.imag(), e.cost, e.p_flow);
    out += line;
  }
  return out;
}

Analysis analyse_case(const SystemCase& system, const AnalysisOptions& options) {
  Analysis a;
  a.merged = merge_parallel_branches(system);
  a.solution = solve_power_flow(a.merged, options.power_flow);
  a.flows = branch_flows(a.merged, a.solution);
  a.graph = build_flow_graph(a.merged, a.flows, options.graph);
  return a;
}

}  // namespace gridrank
