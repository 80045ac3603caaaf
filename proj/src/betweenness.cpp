#include "gridrank/betweenness.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>

#include "gridrank/error.hpp"

namespace gridrank {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Floor on the tie tolerance so that a zero setting still absorbs the
// rounding difference between Floyd-Warshall sums and predecessor sums.
constexpr double kRoundoff = 16 * DBL_EPSILON;

std::size_t require_node(const FlowGraph& g, int id) {
  const auto idx = g.node_index(id);
  if (!idx) throw ValidationError("node " + std::to_string(id) + " is not in the graph");
  return *idx;
}

void collect_paths(const std::vector<std::vector<std::size_t>>& preds, std::size_t node, std::size_t source,
                   std::vector<int>& stack, const FlowGraph& g, std::vector<std::vector<int>>& out) {
  stack.push_back(g.nodes[node].id);
  if (node == source) {
    out.emplace_back(stack.rbegin(), stack.rend());
  } else {
    for (const auto p : preds[node]) collect_paths(preds, p, source, stack, g, out);
  }
  stack.pop_back();
}

std::vector<double> accumulate(const ShortestPathSet& paths, const FlowGraph& graph, Accumulation acc,
                               bool unit) {
  std::vector<double> raw(graph.edges.size(), 0.0);
  std::vector<int> seen(graph.edges.size(), -1);
  int pair_no = 0;
  for (const auto& pair : paths.pairs) {
    for (const auto& path : pair.paths) {
      for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const FlowEdge* e = graph.find_edge(path[k], path[k + 1]);
        if (e == nullptr) {
          throw MappingError("path uses missing edge " + std::to_string(path[k]) + "-" +
                             std::to_string(path[k + 1]));
        }
        const auto idx = static_cast<std::size_t>(e - graph.edges.data());
        if (acc == Accumulation::per_pair) {
          if (seen[idx] == pair_no) continue;
          seen[idx] = pair_no;
        }
        raw[idx] += unit ? 1.0 : e->p_flow;
      }
    }
    ++pair_no;
  }
  return raw;
}

}  // namespace

std::vector<std::vector<double>> all_pairs_costs(const FlowGraph& graph) {
  const std::size_t n = graph.nodes.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (const auto& e : graph.edges) {
    const auto u = require_node(graph, e.from);
    const auto v = require_node(graph, e.to);
    d[u][v] = std::min(d[u][v], e.cost);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto& dk = d[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = d[i][k];
      if (dik == kInf) continue;
      auto& di = d[i];
      for (std::size_t j = 0; j < n; ++j) {
        const double via = dik + dk[j];
        if (via < di[j]) di[j] = via;
      }
    }
  }
  return d;
}

ShortestPathSet all_shortest_paths(const FlowGraph& graph, std::span<const int> sources,
                                   const PathOptions& options) {
  if (!(options.tie_tol >= 0.0)) throw ValidationError("tie tolerance must be non-negative");
  for (const auto& e : graph.edges) {
    if (!(e.cost > 0.0)) throw ValidationError("edge costs must be positive");
  }
  const std::size_t n = graph.nodes.size();
  const auto dist = all_pairs_costs(graph);
  const double rel = std::max(options.tie_tol, kRoundoff);

  std::vector<std::vector<std::pair<std::size_t, double>>> incoming(n);
  for (const auto& e : graph.edges) {
    incoming[require_node(graph, e.to)].emplace_back(require_node(graph, e.from), e.cost);
  }
  // Predecessor lists come out ascending by node id.
  for (auto& in : incoming) {
    std::sort(in.begin(), in.end(), [&](const auto& a, const auto& b) {
      return graph.nodes[a.first].id < graph.nodes[b.first].id;
    });
  }

  std::vector<int> sorted_sources(sources.begin(), sources.end());
  std::sort(sorted_sources.begin(), sorted_sources.end());
  sorted_sources.erase(std::unique(sorted_sources.begin(), sorted_sources.end()), sorted_sources.end());

  std::vector<std::size_t> by_id(n);
  std::iota(by_id.begin(), by_id.end(), 0);
  std::sort(by_id.begin(), by_id.end(), [&](auto a, auto b) { return graph.nodes[a].id < graph.nodes[b].id; });

  struct Plan {
    std::size_t source;
    std::vector<std::vector<std::size_t>> preds;
    std::vector<double> count;
  };
  std::vector<Plan> plans;
  double total = 0.0;
  double worst = 0.0;
  std::pair<int, int> worst_pair{0, 0};

  for (const int sid : sorted_sources) {
    const auto s = require_node(graph, sid);
    Plan plan{s, std::vector<std::vector<std::size_t>>(n), std::vector<double>(n, 0.0)};
    const auto& ds = dist[s];
    for (std::size_t t = 0; t < n; ++t) {
      if (t == s || ds[t] == kInf) continue;
      for (const auto& [u, c] : incoming[t]) {
        if (ds[u] == kInf || !(ds[u] < ds[t])) continue;
        if (std::abs(ds[u] + c - ds[t]) <= rel * ds[t]) plan.preds[t].push_back(u);
      }
    }
    // Path counts in order of increasing distance; predecessors are strictly closer.
    std::vector<std::size_t> order;
    for (std::size_t t = 0; t < n; ++t) {
      if (ds[t] != kInf) order.push_back(t);
    }
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ds[a] < ds[b]; });
    plan.count[s] = 1.0;
    for (const auto t : order) {
      for (const auto u : plan.preds[t]) plan.count[t] += plan.count[u];
    }
    for (std::size_t t = 0; t < n; ++t) {
      if (t == s || ds[t] == kInf) continue;
      total += plan.count[t];
      if (plan.count[t] > worst) {
        worst = plan.count[t];
        worst_pair = {sid, graph.nodes[t].id};
      }
    }
    plans.push_back(std::move(plan));
  }

  if (total > static_cast<double>(options.max_paths)) {
    throw ResourceError("shortest-path enumeration needs " + std::to_string(static_cast<long double>(total)) +
                        " paths, above the cap of " + std::to_string(options.max_paths) + "; worst pair " +
                        std::to_string(worst_pair.first) + "->" + std::to_string(worst_pair.second) + " has " +
                        std::to_string(static_cast<long double>(worst)));
  }

  ShortestPathSet out;
  std::vector<int> stack;
  for (const auto& plan : plans) {
    for (const auto t : by_id) {
      if (t == plan.source || dist[plan.source][t] == kInf) continue;
      PairPaths pp;
      pp.source = graph.nodes[plan.source].id;
      pp.target = graph.nodes[t].id;
      pp.cost = dist[plan.source][t];
      collect_paths(plan.preds, t, plan.source, stack, graph, pp.paths);
      std::sort(pp.paths.begin(), pp.paths.end());
      out.total_paths += pp.paths.size();
      out.pairs.push_back(std::move(pp));
    }
  }
  return out;
}

std::vector<double> line_betweenness(const ShortestPathSet& paths, const FlowGraph& graph, Accumulation acc) {
  return accumulate(paths, graph, acc, false);
}

std::vector<double> past_line_betweenness(const ShortestPathSet& paths, const FlowGraph& graph,
                                          Accumulation acc) {
  return accumulate(paths, graph, acc, true);
}

std::string_view to_string(Approach approach) { return approach == Approach::proposed ? "proposed" : "past"; }

const LineValue* BetweennessReport::find(int from, int to) const {
  for (const auto& l : lines) {
    if (l.from == from && l.to == to) return &l;
  }
  return nullptr;
}

BetweennessReport normalize_and_rank(const FlowGraph& graph, std::span<const double> raw, double margin,
                                     Approach approach) {
  if (raw.size() != graph.edges.size()) throw MappingError("raw values do not match the edge list");
  double top = 0.0;
  for (const double r : raw) {
    if (r < 0.0) throw ValidationError("raw betweenness must be non-negative");
    top = std::max(top, r);
  }
  if (!(top > 0.0)) throw ValidationError("every line has zero betweenness; no source reaches another node");

  BetweennessReport report;
  report.approach = approach;
  report.margin = margin;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    LineValue v;
    v.from = graph.edges[k].from;
    v.to = graph.edges[k].to;
    v.raw = raw[k];
    v.normalized = raw[k] == top ? 1.0 : raw[k] / top;
    v.critical = v.normalized > margin;
    report.lines.push_back(v);
  }
  auto key = [](const LineValue& v) { return std::llround(v.normalized * 1e12); };
  std::sort(report.lines.begin(), report.lines.end(), [&](const LineValue& a, const LineValue& b) {
    const auto ka = key(a), kb = key(b);
    if (ka != kb) return ka > kb;
    return std::pair{a.from, a.to} < std::pair{b.from, b.to};
  });
  for (std::size_t k = 0; k < report.lines.size(); ++k) report.lines[k].rank = static_cast<int>(k + 1);
  return report;
}

BetweennessReport proposed_betweenness(const ShortestPathSet& paths, const FlowGraph& graph,
                                       const BetweennessOptions& options) {
  const auto raw = line_betweenness(paths, graph, options.accumulation);
  return normalize_and_rank(graph, raw, options.margin, Approach::proposed);
}

BetweennessReport past_betweenness(const ShortestPathSet& paths, const FlowGraph& graph,
                                   const BetweennessOptions& options) {
  const auto raw = past_line_betweenness(paths, graph, options.accumulation);
  return normalize_and_rank(graph, raw, options.margin, Approach::past);
}

RankResult rank_lines(const FlowGraph& graph, const BetweennessOptions& options) {
  RankResult r;
  const auto sources = graph.source_ids();
  r.paths = all_shortest_paths(graph, sources, options.paths);
  r.proposed = proposed_betweenness(r.paths, graph, options);
  r.past = past_betweenness(r.paths, graph, options);
  return r;
}

SystemCase shift_generator(const SystemCase& system, int from_bus, int to_bus) {
  const auto fi = system.bus_index(from_bus);
  const auto ti = system.bus_index(to_bus);
  if (!fi) throw ValidationError("bus " + std::to_string(from_bus) + " does not exist");
  if (!ti) throw ValidationError("bus " + std::to_string(to_bus) + " does not exist");
  const auto& src = system.buses[*fi];
  if (!(src.p_gen > 0.0) && src.kind != BusKind::slack) {
    throw ValidationError("bus " + std::to_string(from_bus) + " has no generation to move");
  }
  if (from_bus == to_bus) return system;

  SystemCase out = system;
  auto& a = out.buses[*fi];
  auto& b = out.buses[*ti];
  b.p_gen += a.p_gen;
  b.q_gen += a.q_gen;
  if (b.kind != BusKind::slack) {
    b.kind = a.kind;
    b.v_mag = a.v_mag;
  }
  if (a.kind == BusKind::slack) b.v_ang_deg = a.v_ang_deg;
  a.p_gen = 0.0;
  a.q_gen = 0.0;
  a.kind = BusKind::pq;
  validate(out);
  return out;
}

BetweennessReport sensitivity_shift_generator(const SystemCase& system, int from_bus, int to_bus,
                                              const AnalysisOptions& analysis, const BetweennessOptions& options) {
  const auto shifted = shift_generator(system, from_bus, to_bus);
  const auto a = analyse_case(shifted, analysis);
  return rank_lines(a.graph, options).proposed;
}

}  // namespace gridrank
