#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridrank/case.hpp"
#include "gridrank/powerflow.hpp"

namespace gridrank {

enum class CostScalar { magnitude, reactance };

std::string_view to_string(CostScalar cost);
std::optional<CostScalar> cost_scalar_from_string(std::string_view text);

struct GraphOptions {
  CostScalar cost = CostScalar::magnitude;
  double dead_band = 1e-9;  // |p| at or below this carries no direction
};

struct GraphNode {
  int id = 0;
  bool source = false;
};

/// Directed line, oriented along positive real power.
struct FlowEdge {
  int from = 0;
  int to = 0;
  std::size_t branch_index = 0;
  std::complex<double> complex_weight;  // series r + jx
  double cost = 0.0;
  double p_flow = 0.0;  // real power entering the line at `from`
};

/// A branch whose real flow is inside the dead-band. It has no direction and
/// takes no part in path analysis, but it is still part of the topology.
struct IdleLink {
  int a = 0;
  int b = 0;
  std::size_t branch_index = 0;
  std::complex<double> complex_weight;
};

struct FlowGraph {
  std::vector<GraphNode> nodes;  // case bus order
  std::vector<FlowEdge> edges;   // sorted by (from, to)
  std::vector<IdleLink> idle;

  std::optional<std::size_t> node_index(int id) const;
  const FlowEdge* find_edge(int from, int to) const;
  std::vector<int> source_ids() const;
};

/// Buses with positive generation plus the slack, ascending.
std::vector<int> source_nodes(const SystemCase& system);

double edge_cost(const BranchRecord& branch, CostScalar cost);

/// `system` must have its parallels merged; `flows` must follow its branch order.
FlowGraph build_flow_graph(const SystemCase& system, std::span<const BranchFlow> flows,
                           const GraphOptions& options = {});

/// Simple undirected adjacency. `link_degree` counts parallel circuits
/// separately when built from an unmerged case.
struct Topology {
  std::vector<int> ids;
  std::vector<std::vector<std::size_t>> neighbours;  // sorted, no duplicates
  std::vector<int> link_degree;
  std::size_t link_count = 0;

  std::size_t node_count() const { return ids.size(); }
  std::size_t simple_edge_count() const;
};

/// Directed edges and idle links with direction dropped.
Topology undirected_view(const FlowGraph& graph);

/// Physical topology of a case, one link per branch record.
Topology topology_view(const SystemCase& system);

/// Text edge list: node header, then "from to r x cost p_flow" per edge.
std::string export_edge_list(const FlowGraph& graph);

/// Merge, solve, compute flows and build the graph in one step.
struct Analysis {
  SystemCase merged;
  PowerFlowSolution solution;
  std::vector<BranchFlow> flows;
  FlowGraph graph;
};

struct AnalysisOptions {
  PowerFlowOptions power_flow;
  GraphOptions graph;
};

Analysis analyse_case(const SystemCase& system, const AnalysisOptions& options = {});

}  // namespace gridrank
