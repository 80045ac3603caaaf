#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "gridrank/case.hpp"
#include "gridrank/graph.hpp"

namespace fixtures {

inline std::filesystem::path data_file(const std::string& name) {
  return std::filesystem::path(GRIDRANK_DATA_DIR) / name;
}

// Writes text right-aligned into 1-based inclusive columns.
inline void put(std::string& card, std::size_t first, std::size_t last, const std::string& text) {
  if (card.size() < last) card.resize(last, ' ');
  const std::size_t width = last - first + 1;
  const std::string cell = text.size() >= width ? text.substr(0, width) : std::string(width - text.size(), ' ') + text;
  card.replace(first - 1, width, cell);
}

// Slack 1 at 1.0 pu, PQ bus 2 drawing 50 MW over a j0.1 line.
inline std::string two_bus_cdf() {
  std::string title(80, ' ');
  put(title, 2, 9, "01/01/00");
  put(title, 32, 37, "100.0");
  title.replace(45, 11, "TWO BUS SYS");
  std::string b1, b2, l1;
  put(b1, 1, 4, "1");
  put(b1, 25, 26, "3");
  put(b1, 28, 33, "1.0000");
  put(b1, 85, 90, "1.0000");
  put(b2, 1, 4, "2");
  put(b2, 25, 26, "0");
  put(b2, 28, 33, "1.0000");
  put(b2, 41, 49, "50.00");
  put(l1, 1, 4, "1");
  put(l1, 6, 9, "2");
  put(l1, 20, 29, "0.0");
  put(l1, 30, 40, "0.1");
  return title + "\nBUS DATA FOLLOWS                             2 ITEMS\n" + b1 + "\n" + b2 +
         "\n-999\nBRANCH DATA FOLLOWS                          1 ITEMS\n" + l1 + "\n-999\nEND OF DATA\n";
}

inline gridrank::SystemCase two_bus_case() {
  gridrank::SystemCase c;
  c.name = "TWO BUS SYS";
  c.base_mva = 100.0;
  gridrank::BusRecord slack;
  slack.id = 1;
  slack.kind = gridrank::BusKind::slack;
  gridrank::BusRecord load;
  load.id = 2;
  load.p_load = 0.5;
  c.buses = {slack, load};
  gridrank::BranchRecord line;
  line.from_bus = 1;
  line.to_bus = 2;
  line.x = 0.1;
  c.branches = {line};
  return c;
}

struct EdgeSpec {
  int from;
  int to;
  double cost;
  double p_flow = 1.0;
};

// Synthetic flow graph on nodes 1..n; edges sorted as build_flow_graph does.
inline gridrank::FlowGraph make_graph(int n, std::vector<EdgeSpec> edges, std::vector<int> sources = {1}) {
  gridrank::FlowGraph g;
  for (int i = 1; i <= n; ++i) {
    g.nodes.push_back({i, std::find(sources.begin(), sources.end(), i) != sources.end()});
  }
  std::sort(edges.begin(), edges.end(),
            [](const EdgeSpec& a, const EdgeSpec& b) { return std::pair{a.from, a.to} < std::pair{b.from, b.to}; });
  for (std::size_t k = 0; k < edges.size(); ++k) {
    gridrank::FlowEdge e;
    e.from = edges[k].from;
    e.to = edges[k].to;
    e.branch_index = k;
    e.complex_weight = {0.0, edges[k].cost};
    e.cost = edges[k].cost;
    e.p_flow = edges[k].p_flow;
    g.edges.push_back(e);
  }
  return g;
}

}  // namespace fixtures
