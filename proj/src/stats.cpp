#include "gridrank/stats.hpp"

#include <algorithm>
#include <deque>

#include "gridrank/error.hpp"

namespace gridrank {

DegreeTable degrees(const Topology& topology) {
  DegreeTable t;
  t.ids = topology.ids;
  t.degree = topology.link_degree;
  t.in_degree.assign(t.ids.size(), 0);
  t.out_degree.assign(t.ids.size(), 0);
  int best = -1;
  for (std::size_t i = 0; i < t.ids.size(); ++i) {
    const int d = t.degree[i];
    ++t.histogram[d];
    if (d > best || (d == best && t.ids[i] < t.hub)) {
      best = d;
      t.hub = t.ids[i];
    }
  }
  return t;
}

DegreeTable degrees(const Topology& topology, const FlowGraph& graph) {
  auto t = degrees(topology);
  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < t.ids.size(); ++i) index[t.ids[i]] = i;
  for (const auto& e : graph.edges) {
    const auto from = index.find(e.from);
    const auto to = index.find(e.to);
    if (from == index.end() || to == index.end()) {
      throw MappingError("edge " + std::to_string(e.from) + "-" + std::to_string(e.to) + " is not in the topology");
    }
    ++t.out_degree[from->second];
    ++t.in_degree[to->second];
  }
  return t;
}

Clustering clustering(const Topology& topology) {
  const std::size_t n = topology.node_count();
  Clustering c;
  c.per_node.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nb = topology.neighbours[i];
    const std::size_t d = nb.size();
    if (d < 2) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < d; ++a) {
      const auto& na = topology.neighbours[nb[a]];
      for (std::size_t b = a + 1; b < d; ++b) {
        if (std::binary_search(na.begin(), na.end(), nb[b])) ++links;
      }
    }
    c.per_node[i] = 2.0 * static_cast<double>(links) / static_cast<double>(d * (d - 1));
  }
  double sum = 0.0;
  for (double v : c.per_node) sum += v;
  c.graph = n == 0 ? 0.0 : sum / static_cast<double>(n);
  return c;
}

std::vector<std::vector<int>> hop_distances(const Topology& topology) {
  const std::size_t n = topology.node_count();
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    auto& row = dist[s];
    row[s] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (const auto v : topology.neighbours[u]) {
        if (row[v] < 0) {
          row[v] = row[u] + 1;
          queue.push_back(v);
        }
      }
    }
  }
  return dist;
}

std::vector<std::vector<int>> connected_components(const Topology& topology) {
  const std::size_t n = topology.node_count();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const int c = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<std::size_t> stack{s};
    comp[s] = c;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      out.back().push_back(topology.ids[u]);
      for (const auto v : topology.neighbours[u]) {
        if (comp[v] < 0) {
          comp[v] = c;
          stack.push_back(v);
        }
      }
    }
  }
  for (auto& c : out) std::sort(c.begin(), c.end());
  std::sort(out.begin(), out.end());
  return out;
}

PathLengthStats path_length_stats(const Topology& topology) {
  const auto comps = connected_components(topology);
  if (comps.size() > 1) {
    throw DisconnectedError("graph has " + std::to_string(comps.size()) + " connected components", comps);
  }
  const auto dist = hop_distances(topology);
  const std::size_t n = topology.node_count();
  PathLengthStats s;
  long long total = 0;
  long long pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int d = dist[i][j];
      total += d;
      ++pairs;
      if (d > s.diameter) {
        s.diameter = d;
        s.diameter_pair_count = 1;
      } else if (d == s.diameter) {
        ++s.diameter_pair_count;
      }
    }
  }
  s.char_path_length = pairs == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(pairs);
  return s;
}

GraphStats compute_stats(const Topology& topology, const FlowGraph& graph) {
  GraphStats s;
  s.node_count = topology.node_count();
  s.edge_count = topology.link_count;
  s.average_degree = s.node_count == 0 ? 0.0 : 2.0 * static_cast<double>(s.edge_count) / static_cast<double>(s.node_count);
  s.degrees = degrees(topology, graph);
  s.clustering = clustering(topology);
  s.paths = path_length_stats(topology);
  return s;
}

}  // namespace gridrank
