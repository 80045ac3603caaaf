#pragma once

#include <map>
#include <vector>

#include "gridrank/graph.hpp"

namespace gridrank {

struct DegreeTable {
  std::vector<int> ids;
  std::vector<int> degree;
  std::vector<int> in_degree;
  std::vector<int> out_degree;
  int hub = 0;                   // max degree, smallest id on ties
  std::map<int, int> histogram;  // degree -> node count
};

/// Degrees from `topology`; in/out degrees from the directed edges of `graph`
/// (nodes are matched by id, idle links count for neither).
DegreeTable degrees(const Topology& topology, const FlowGraph& graph);
DegreeTable degrees(const Topology& topology);

struct Clustering {
  std::vector<double> per_node;
  double graph = 0.0;
};

/// Nodes with fewer than two neighbours get 0.
Clustering clustering(const Topology& topology);

/// BFS hop counts, -1 where unreachable.
std::vector<std::vector<int>> hop_distances(const Topology& topology);

/// Node ids per connected component, each sorted, ordered by smallest id.
std::vector<std::vector<int>> connected_components(const Topology& topology);

struct PathLengthStats {
  double char_path_length = 0.0;
  int diameter = 0;
  int diameter_pair_count = 0;
};

/// Averages over unordered pairs. Throws DisconnectedError.
PathLengthStats path_length_stats(const Topology& topology);

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double average_degree = 0.0;
  DegreeTable degrees;
  Clustering clustering;
  PathLengthStats paths;
};

GraphStats compute_stats(const Topology& topology, const FlowGraph& graph);

}  // namespace gridrank
