#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gridrank/graph.hpp"

namespace gridrank {

struct PathOptions {
  double tie_tol = 1e-9;               // relative, on path cost
  std::size_t max_paths = 1'000'000;  // total over all pairs
};

struct PairPaths {
  int source = 0;
  int target = 0;
  double cost = 0.0;
  std::vector<std::vector<int>> paths;  // node sequences, lexicographic order
};

struct ShortestPathSet {
  std::vector<PairPaths> pairs;  // by (source, target); unreachable pairs omitted
  std::size_t total_paths = 0;
};

/// All-pairs costs by Floyd-Warshall; row i, column j is the cost from
/// graph.nodes[i] to graph.nodes[j] (infinity when unreachable).
std::vector<std::vector<double>> all_pairs_costs(const FlowGraph& graph);

/// Every minimal-cost directed path from each source to each other node.
/// Throws ResourceError when the total would exceed options.max_paths.
ShortestPathSet all_shortest_paths(const FlowGraph& graph, std::span<const int> sources,
                                   const PathOptions& options = {});

enum class Accumulation {
  per_path,  // a line on k stored paths collects k contributions
  per_pair,  // at most one contribution per (source, target) pair
};

/// Raw proposed betweenness, aligned with graph.edges.
std::vector<double> line_betweenness(const ShortestPathSet& paths, const FlowGraph& graph,
                                     Accumulation accumulation = Accumulation::per_path);

/// Same accumulation with a unit contribution per path.
std::vector<double> past_line_betweenness(const ShortestPathSet& paths, const FlowGraph& graph,
                                          Accumulation accumulation = Accumulation::per_path);

enum class Approach { proposed, past };
std::string_view to_string(Approach approach);

struct LineValue {
  int from = 0;
  int to = 0;
  double raw = 0.0;
  double normalized = 0.0;
  int rank = 0;
  bool critical = false;
};

struct BetweennessReport {
  Approach approach = Approach::proposed;
  double margin = 0.5;
  std::vector<LineValue> lines;  // rank order

  const LineValue* find(int from, int to) const;
};

/// Divides by the maximum, sorts descending with (from, to) ascending on
/// ties, and flags lines above `margin`. Throws ValidationError if every raw
/// value is zero.
BetweennessReport normalize_and_rank(const FlowGraph& graph, std::span<const double> raw, double margin,
                                     Approach approach);

struct BetweennessOptions {
  PathOptions paths;
  double margin = 0.5;
  Accumulation accumulation = Accumulation::per_path;
};

BetweennessReport proposed_betweenness(const ShortestPathSet& paths, const FlowGraph& graph,
                                       const BetweennessOptions& options = {});
BetweennessReport past_betweenness(const ShortestPathSet& paths, const FlowGraph& graph,
                                   const BetweennessOptions& options = {});

struct RankResult {
  ShortestPathSet paths;
  BetweennessReport proposed;
  BetweennessReport past;
};

/// Both reports for the graph's own source nodes.
RankResult rank_lines(const FlowGraph& graph, const BetweennessOptions& options = {});

/// Moves generation, reactive output, bus kind and voltage setpoint from one
/// bus to another. The slack moves with it.
SystemCase shift_generator(const SystemCase& system, int from_bus, int to_bus);

BetweennessReport sensitivity_shift_generator(const SystemCase& system, int from_bus, int to_bus,
                                              const AnalysisOptions& analysis = {},
                                              const BetweennessOptions& options = {});

}  // namespace gridrank
