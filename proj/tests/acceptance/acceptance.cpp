// Acceptance run: one PASS/FAIL line per criterion, followed by indented
// detail. `acceptance N` runs criterion N only. Exit status is nonzero when
// any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gridrank/betweenness.hpp"
#include "gridrank/case.hpp"
#include "gridrank/graph.hpp"
#include "gridrank/powerflow.hpp"
#include "gridrank/stats.hpp"
#include "gridrank/transient.hpp"
#include "oracles.hpp"

using namespace gridrank;

namespace {

// Reference values transcribed from the published tables.

struct TopologyRow {
  const char* file;
  std::size_t nodes;
  std::size_t edges;
  double avg_degree;
  double clustering;
  double cpl;
  int diameter;
  int diameter_pairs;
};

const TopologyRow kTopology[] = {
    {"ieee30.cdf", 30, 41, 2.73, 0.2348, 3.43, 7, 3},
    {"ieee57.cdf", 57, 80, 2.81, 0.1211, 5.12, 13, 4},
    {"ieee118.cdf", 118, 186, 3.15, 0.1592, 2.95, 9, 3},
    {"ieee300.cdf", 300, 411, 2.74, 0.0851, 5.95, 17, 1},
};

const int kDegree30[30] = {2, 4, 2, 4, 2, 7, 2, 2, 3, 6, 1, 5, 1, 2, 4, 2, 2, 2, 2, 2, 2, 3, 2, 3, 3, 1, 4, 3, 2, 2};
const int kIn30[30] = {0, 1, 1, 2, 2, 2, 1, 2, 1, 2, 1, 2, 0, 1, 2, 1, 2, 1, 2, 1, 2, 1, 1, 3, 1, 1, 1, 1, 1, 2};
const int kOut30[30] = {2, 3, 1, 2, 0, 5, 1, 0, 2, 4, 0, 3, 1, 1, 2, 1, 0, 1, 0, 1, 0, 2, 1, 0, 2, 0, 3, 2, 1, 0};

struct WeightRow {
  int from;
  int to;
  double r;
  double x;
};

const WeightRow kWeights30[] = {
    {1, 2, 0.0192, 0.0575},   {1, 3, 0.0452, 0.1852},   {2, 4, 0.0570, 0.1737},   {2, 5, 0.0472, 0.1983},
    {2, 6, 0.0581, 0.1763},   {3, 4, 0.0132, 0.0379},   {4, 6, 0.0119, 0.0414},   {4, 12, 0.0000, 0.2560},
    {6, 7, 0.0267, 0.0820},   {6, 8, 0.0120, 0.0420},   {6, 9, 0.0000, 0.2080},   {6, 10, 0.0000, 0.5560},
    {6, 28, 0.0169, 0.0599},  {7, 5, 0.0460, 0.1160},   {9, 11, 0.0000, 0.2080},  {9, 10, 0.0000, 0.1100},
    {10, 20, 0.0936, 0.2090}, {10, 17, 0.0324, 0.0845}, {10, 21, 0.0348, 0.0749}, {10, 22, 0.0727, 0.1499},
    {12, 14, 0.1231, 0.2559}, {12, 15, 0.0662, 0.1304}, {12, 16, 0.0945, 0.1987}, {13, 12, 0.0000, 0.1400},
    {14, 15, 0.2210, 0.1997}, {15, 18, 0.1073, 0.2185}, {15, 23, 0.1000, 0.2020}, {16, 17, 0.0824, 0.1923},
    {18, 19, 0.0639, 0.1292}, {20, 19, 0.0340, 0.0680}, {22, 21, 0.0116, 0.0236}, {22, 24, 0.1150, 0.1790},
    {23, 24, 0.1320, 0.2700}, {25, 24, 0.1885, 0.3292}, {25, 26, 0.2544, 0.3800}, {27, 25, 0.1093, 0.2087},
    {27, 29, 0.2198, 0.4153}, {27, 30, 0.3202, 0.6027}, {28, 27, 0.0000, 0.3960}, {27, 8, 0.0636, 0.2000},
    {29, 30, 0.2399, 0.4533},
};

struct RankRow {
  int from;
  int to;
  double value;
  bool unstable = false;
};

const RankRow kProposed30[] = {
    {1, 2, 1.0000, true},    {1, 3, 1.0000, true},    {2, 4, 1.0000, true},    {2, 5, 1.0000, true},
    {2, 6, 1.0000, true},    {6, 7, 0.9621, false},   {6, 8, 0.9621, false},   {6, 9, 0.9621, false},
    {6, 28, 0.9621, false},  {9, 10, 0.4810, false},  {9, 11, 0.4810, false},  {3, 4, 0.4000, false},
    {10, 17, 0.3741, false}, {10, 20, 0.3741, false}, {10, 21, 0.3741, false}, {10, 22, 0.3741, false},
    {4, 12, 0.3500, false},  {12, 14, 0.3207, false}, {12, 15, 0.3207, false}, {12, 16, 0.3207, false},
    {28, 27, 0.3207, false}, {27, 25, 0.2672, false}, {27, 29, 0.2672, false}, {27, 30, 0.2672, false},
    {15, 18, 0.1603, false}, {15, 23, 0.1603, false}, {20, 19, 0.1069, false}, {22, 24, 0.1069, false},
};

const RankRow kPast30[] = {
    {1, 2, 1.0000},   {2, 4, 1.0000},   {2, 5, 1.0000},   {2, 6, 1.0000},   {6, 7, 1.0000},   {6, 8, 1.0000},
    {6, 9, 1.0000},   {6, 28, 1.0000},  {1, 3, 0.9635},   {9, 10, 0.5000},  {9, 11, 0.5000},  {10, 17, 0.3889},
    {10, 20, 0.3889}, {10, 21, 0.3889}, {10, 22, 0.3889}, {3, 4, 0.3854},   {4, 12, 0.3372},  {12, 14, 0.3333},
    {12, 15, 0.3333}, {12, 16, 0.3333}, {28, 27, 0.3333}, {27, 25, 0.2778}, {27, 29, 0.2778}, {27, 30, 0.2778},
    {15, 18, 0.1667}, {15, 23, 0.1667}, {20, 19, 0.1111}, {22, 24, 0.1111},
};

const RankRow kShift3[] = {
    {3, 1, 1.0}, {3, 4, 1.0}, {4, 2, 1.0}, {4, 6, 1.0}, {4, 12, 1.0},
    {2, 6, 0.6786}, {6, 7, 0.6786}, {6, 8, 0.6786}, {6, 9, 0.6786}, {6, 28, 0.6786},
};

const RankRow kShift23[] = {
    {23, 15, 1.0}, {23, 24, 1.0}, {15, 12, 1.0}, {15, 14, 1.0}, {15, 18, 1.0},
    {12, 4, 0.7059}, {12, 13, 0.7059}, {12, 16, 0.7059}, {24, 22, 0.7059}, {24, 25, 0.7059},
};

const RankRow kTop57[] = {
    {1, 2, 1.0},     {1, 15, 1.0},    {1, 16, 1.0},    {1, 17, 1.0},    {2, 15, 1.0},
    {15, 13, 1.0},   {15, 14, 1.0},   {15, 45, 1.0},   {14, 46, 0.5820}, {46, 47, 0.5542},
    {47, 48, 0.5265}, {48, 38, 0.4988}, {38, 22, 0.4711}, {38, 37, 0.4711}, {9, 13, 0.3325},
};

const RankRow kTop118[] = {
    {9, 8, 1.0},      {10, 9, 1.0},     {8, 5, 0.9697},   {8, 30, 0.9697},  {89, 85, 0.8175},
    {89, 88, 0.8175}, {89, 90, 0.8175}, {89, 92, 0.8175}, {92, 91, 0.8175}, {92, 93, 0.8175},
    {92, 94, 0.8175}, {92, 102, 0.8175}, {49, 42, 0.7676}, {49, 45, 0.7676}, {49, 47, 0.7676},
};

const RankRow kTop300[] = {
    {2, 3, 1.0},      {3, 1, 1.0},      {3, 4, 1.0},      {3, 7, 1.0},      {3, 129, 1.0},
    {249, 3, 1.0},    {4, 16, 0.9877},  {16, 15, 0.9768}, {16, 36, 0.9768}, {33, 36, 0.9441},
    {36, 28, 0.9441}, {36, 35, 0.9441}, {36, 40, 0.9441}, {15, 31, 0.6840}, {31, 32, 0.6840},
};

// Harness.

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::vector<std::string> detail;

  void note(const char* text) { detail.emplace_back(text); }
  void note(const char* fmt, auto first, auto... rest) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, first, rest...);
    detail.emplace_back(buf);
  }
  void require(bool ok, const char* fmt, auto... args) {
    if (!ok) pass = false;
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    detail.push_back(std::string(ok ? "ok   " : "MISS ") + buf);
  }
};

std::string label(int a, int b) { return "L" + std::to_string(a) + "-" + std::to_string(b); }

// Looks a line up in either orientation; reports whether it was reversed.
const LineValue* find_line(const BetweennessReport& r, int a, int b, bool* reversed = nullptr) {
  if (const auto* l = r.find(a, b)) {
    if (reversed) *reversed = false;
    return l;
  }
  if (const auto* l = r.find(b, a)) {
    if (reversed) *reversed = true;
    return l;
  }
  return nullptr;
}

bool round4_equal(double value, double printed) { return std::abs(std::round(value * 1e4) / 1e4 - printed) < 5e-5; }

const Analysis& analysis(const char* file) {
  static std::map<std::string, Analysis> cache;
  auto it = cache.find(file);
  if (it == cache.end()) it = cache.emplace(file, analyse_case(load_case_file(fixtures::data_file(file)))).first;
  return it->second;
}

// Compares a published ranking column against a report. Rows outside the
// tolerance are listed; returns the count within tolerance.
std::size_t compare_column(Outcome& o, const BetweennessReport& r, std::span<const RankRow> rows, double tol,
                           bool gate) {
  std::size_t within = 0;
  for (const auto& row : rows) {
    bool reversed = false;
    const auto* l = find_line(r, row.from, row.to, &reversed);
    if (!l) {
      if (gate) o.pass = false;
      o.note("%s %s: not a flow edge", gate ? "MISS" : "diff", label(row.from, row.to).c_str());
      continue;
    }
    const bool ok = std::abs(l->normalized - row.value) <= tol;
    within += ok;
    if (!ok || reversed) {
      if (gate && !ok) o.pass = false;
      o.note("%s %s: table %.4f, computed %.4f (rank %d)%s", ok ? "ok  " : (gate ? "MISS" : "diff"),
             label(row.from, row.to).c_str(), row.value, l->normalized, l->rank,
             reversed ? ", computed orientation reversed" : "");
    }
  }
  return within;
}

// Pairs the table orders strictly that the computed values order the other way.
std::size_t discordant_pairs(const BetweennessReport& r, std::span<const RankRow> rows) {
  std::size_t bad = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      if (!(rows[i].value > rows[j].value)) continue;
      const auto* a = find_line(r, rows[i].from, rows[i].to);
      const auto* b = find_line(r, rows[j].from, rows[j].to);
      if (!a || !b || !(a->normalized > b->normalized)) ++bad;
    }
  }
  return bad;
}

// Criteria.

Outcome check_topology_reproduction() {
  Outcome o;
  for (const auto& row : kTopology) {
    const auto t0 = Clock::now();
    const auto c = load_case_file(fixtures::data_file(row.file));
    const auto& a = analysis(row.file);
    const auto s = compute_stats(topology_view(c), a.graph);
    const double secs = seconds_since(t0);
    const double avg = std::round(s.average_degree * 100.0) / 100.0;
    o.require(s.node_count == row.nodes && s.edge_count == row.edges && std::abs(avg - row.avg_degree) < 1e-9 &&
                  secs < 1.0,
              "%s: nodes %zu/%zu edges %zu/%zu avg degree %.2f/%.2f, %.3f s", row.file, s.node_count, row.nodes,
              s.edge_count, row.edges, avg, row.avg_degree, secs);
  }
  return o;
}

Outcome check_degree_tables() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto& a = analysis("ieee30.cdf");
  const auto s = compute_stats(topology_view(a.merged), a.graph);
  const double secs = seconds_since(t0);
  const auto& d = s.degrees;
  int degree_hits = 0, inout_hits = 0;
  std::string degree_miss, inout_miss;
  for (std::size_t i = 0; i < 30; ++i) {
    const int id = d.ids[i];
    if (d.degree[i] == kDegree30[id - 1]) {
      ++degree_hits;
    } else {
      degree_miss += " " + std::to_string(id);
    }
    inout_hits += (d.in_degree[i] == kIn30[id - 1]) + (d.out_degree[i] == kOut30[id - 1]);
    if (d.in_degree[i] != kIn30[id - 1] || d.out_degree[i] != kOut30[id - 1]) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " %d(%d/%d vs %d/%d)", id, d.in_degree[i], d.out_degree[i], kIn30[id - 1],
                    kOut30[id - 1]);
      inout_miss += buf;
    }
  }
  const auto hub = static_cast<std::size_t>(std::find(d.ids.begin(), d.ids.end(), d.hub) - d.ids.begin());
  o.require(d.hub == 6 && d.degree[hub] == 7, "hub %d with degree %d", d.hub, d.degree[hub]);
  o.require(degree_hits == 30, "degree table: %d/30 entries%s%s", degree_hits, degree_miss.empty() ? "" : ", differ:",
            degree_miss.c_str());
  o.require(inout_hits == 60, "in/out table: %d/60 entries%s%s", inout_hits,
            inout_miss.empty() ? "" : ", node(in/out computed vs table):", inout_miss.c_str());
  o.require(secs < 1.0, "runtime %.3f s", secs);
  return o;
}

Outcome check_clustering_paths() {
  Outcome o;
  for (const auto& row : kTopology) {
    const auto& a = analysis(row.file);
    const auto s = compute_stats(topology_view(load_case_file(fixtures::data_file(row.file))), a.graph);
    const bool binding = std::string(row.file) == "ieee30.cdf";
    const double cc_tol = binding ? 0.005 : 0.02;
    o.require(std::abs(s.clustering.graph - row.clustering) <= cc_tol, "%s: CC %.4f vs %.4f (tol %.3f)", row.file,
              s.clustering.graph, row.clustering, cc_tol);
    if (binding) {
      o.require(std::abs(s.paths.char_path_length - row.cpl) <= 0.05, "%s: CPL %.4f vs %.2f (tol 0.05)", row.file,
                s.paths.char_path_length, row.cpl);
      o.require(s.paths.diameter == row.diameter, "%s: diameter %d vs %d", row.file, s.paths.diameter, row.diameter);
      o.require(s.paths.diameter_pair_count == row.diameter_pairs, "%s: diameter pairs %d vs %d", row.file,
                s.paths.diameter_pair_count, row.diameter_pairs);
    } else {
      o.note("info %s: CPL %.4f vs %.2f (%+.2f), diameter %d vs %d, diameter pairs %d vs %d (report only)",
             row.file, s.paths.char_path_length, row.cpl, s.paths.char_path_length - row.cpl, s.paths.diameter,
             row.diameter, s.paths.diameter_pair_count, row.diameter_pairs);
    }
  }
  return o;
}

Outcome check_weight_matrix() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto& g = analysis("ieee30.cdf").graph;
  int hits = 0;
  for (const auto& w : kWeights30) {
    const FlowEdge* e = g.find_edge(w.from, w.to);
    if (!e) {
      std::string why = "no edge in this orientation";
      if (g.find_edge(w.to, w.from)) why = "computed orientation " + label(w.to, w.from).substr(1);
      for (const auto& l : g.idle) {
        if ((l.a == w.from && l.b == w.to) || (l.a == w.to && l.b == w.from)) why = "zero-flow link, no orientation";
      }
      o.require(false, "w%d-%d: %s", w.from, w.to, why.c_str());
      continue;
    }
    const bool ok = round4_equal(e->complex_weight.real(), w.r) && round4_equal(e->complex_weight.imag(), w.x);
    hits += ok;
    if (!ok) {
      o.require(false, "w%d-%d: computed %.4f%+.4fi, table %.4f%+.4fi", w.from, w.to, e->complex_weight.real(),
                e->complex_weight.imag(), w.r, w.x);
    }
  }
  const double secs = seconds_since(t0);
  o.require(hits == 41, "%d/41 entries match in value and orientation", hits);
  o.require(secs < 1.0, "runtime %.3f s", secs);
  return o;
}

Outcome proposed_betweenness_30(CostScalar cost, bool gate) {
  Outcome o;
  const auto t0 = Clock::now();
  AnalysisOptions opts;
  opts.graph.cost = cost;
  const auto a = analyse_case(load_case_file(fixtures::data_file("ieee30.cdf")), opts);
  const auto r = rank_lines(a.graph);
  const double secs = seconds_since(t0);
  const auto& rep = r.proposed;
  auto value = [&](int x, int y) {
    const auto* l = find_line(rep, x, y);
    return l ? l->normalized : -1.0;
  };
  std::string top;
  for (int k = 0; k < 6 && k < static_cast<int>(rep.lines.size()); ++k) {
    char buf[48];
    std::snprintf(buf, sizeof buf, " %s=%.4f", label(rep.lines[k].from, rep.lines[k].to).c_str(),
                  rep.lines[k].normalized);
    top += buf;
  }
  o.note("cost %s, computed top:%s", std::string(to_string(cost)).c_str(), top.c_str());
  auto check = [&](bool ok, const char* fmt, auto... args) {
    if (gate) {
      o.require(ok, fmt, args...);
    } else {
      char buf[400];
      std::snprintf(buf, sizeof buf, fmt, args...);
      o.note("%s %s", ok ? "ok  " : "diff", buf);
    }
  };
  for (const auto& [x, y] : {std::pair{1, 2}, {1, 3}, {2, 4}, {2, 5}, {2, 6}}) {
    check(round4_equal(value(x, y), 1.0), "%s at 1.0000: %.4f", label(x, y).c_str(), value(x, y));
  }
  for (const auto& [x, y] : {std::pair{6, 7}, {6, 8}, {6, 9}, {6, 28}}) {
    check(std::abs(value(x, y) - 0.9621) <= 0.01, "%s = 0.9621 +- 0.01: %.4f", label(x, y).c_str(), value(x, y));
  }
  check(std::abs(value(9, 10) - 0.4810) <= 0.01, "L9-10 = 0.4810 +- 0.01: %.4f", value(9, 10));
  check(std::abs(value(3, 4) - 0.4000) <= 0.01, "L3-4 = 0.4000 +- 0.01: %.4f", value(3, 4));
  const auto bad = discordant_pairs(rep, kProposed30);
  check(bad == 0, "table ordering up to ties: %zu discordant pairs", bad);
  check(secs < 5.0, "runtime %.3f s", secs);
  return o;
}

Outcome check_proposed_betweenness() {
  // The magnitude cost is the committed default; the reactance cost is
  // evaluated alongside as required when the default misses.
  auto o = proposed_betweenness_30(CostScalar::magnitude, true);
  if (!o.pass) {
    const auto alt = proposed_betweenness_30(CostScalar::reactance, false);
    o.note("reactance variant (not committed):");
    for (const auto& d : alt.detail) o.detail.push_back("  " + d);
  }
  return o;
}

Outcome check_past_betweenness_30() {
  Outcome o;
  const auto r = rank_lines(analysis("ieee30.cdf").graph);
  const auto& rep = r.past;
  const auto* l13 = find_line(rep, 1, 3);
  o.require(l13 && std::abs(l13->normalized - 0.9635) <= 0.01, "L1-3 = 0.9635 +- 0.01: %.4f",
            l13 ? l13->normalized : -1.0);
  for (const auto& [x, y] : {std::pair{6, 7}, {6, 8}, {6, 9}, {6, 28}}) {
    const auto* l = find_line(rep, x, y);
    const bool at_one = l && round4_equal(l->normalized, 1.0);
    const bool above = l && l13 && l->rank < l13->rank;
    o.require(at_one && above, "%s at 1.0000 and above L1-3: %.4f (rank %d vs %d)", label(x, y).c_str(),
              l ? l->normalized : -1.0, l ? l->rank : 0, l13 ? l13->rank : 0);
  }
  const auto* l910 = find_line(rep, 9, 10);
  o.require(l910 && std::abs(l910->normalized - 0.5) <= 0.01, "L9-10 = 0.5000 +- 0.01: %.4f",
            l910 ? l910->normalized : -1.0);
  std::string top;
  for (int k = 0; k < 6; ++k) {
    char buf[48];
    std::snprintf(buf, sizeof buf, " %s=%.4f", label(rep.lines[k].from, rep.lines[k].to).c_str(),
                  rep.lines[k].normalized);
    top += buf;
  }
  o.note("computed top:%s", top.c_str());
  const auto n = compare_column(o, rep, kPast30, 0.01, false);
  o.note("info rows within 0.01: %zu/%zu, discordant pairs %zu", n, std::size(kPast30), discordant_pairs(rep, kPast30));
  return o;
}

void top_five(Outcome& o, const char* title, const BetweennessReport& rep, std::span<const RankRow> rows) {
  std::set<std::pair<int, int>> want, got;
  for (std::size_t k = 0; k < 5; ++k) want.insert({rows[k].from, rows[k].to});
  std::string got_text;
  for (std::size_t k = 0; k < 5 && k < rep.lines.size(); ++k) {
    got.insert({rep.lines[k].from, rep.lines[k].to});
    char buf[48];
    std::snprintf(buf, sizeof buf, " %s=%.4f", label(rep.lines[k].from, rep.lines[k].to).c_str(),
                  rep.lines[k].normalized);
    got_text += buf;
  }
  bool values = true;
  for (const auto& row : rows.first(5)) {
    const auto* l = rep.find(row.from, row.to);
    values = values && l && std::abs(l->normalized - 1.0) <= 0.01;
  }
  o.require(want == got && values, "%s: computed top-5%s", title, got_text.c_str());
  compare_column(o, rep, rows.subspan(5), 0.01, false);
}

Outcome check_sensitivity() {
  Outcome o;
  const auto c = load_case_file(fixtures::data_file("ieee30.cdf"));
  top_five(o, "generation 1->3", sensitivity_shift_generator(c, 1, 3), kShift3);
  top_five(o, "generation 1->23", sensitivity_shift_generator(c, 1, 23), kShift23);
  return o;
}

Outcome check_larger_systems() {
  Outcome o;
  {
    const auto rep = rank_lines(analysis("ieee57.cdf").graph).proposed;
    for (const auto& row : std::span(kTop57).first(4)) {
      const auto* l = rep.find(row.from, row.to);
      o.require(l && round4_equal(l->normalized, 1.0), "57-bus %s at 1.0000: %.4f (rank %d)",
                label(row.from, row.to).c_str(), l ? l->normalized : -1.0, l ? l->rank : 0);
    }
    const auto n = compare_column(o, rep, std::span(kTop57).subspan(4), 0.02, false);
    o.note("info 57-bus rows 5-15 within 0.02: %zu/11, discordant pairs %zu", n, discordant_pairs(rep, kTop57));
  }
  {
    const auto rep = rank_lines(analysis("ieee118.cdf").graph).proposed;
    for (const auto& row : std::span(kTop118).first(2)) {
      const auto* l = rep.find(row.from, row.to);
      o.require(l && round4_equal(l->normalized, 1.0), "118-bus %s at 1.0000: %.4f (rank %d)",
                label(row.from, row.to).c_str(), l ? l->normalized : -1.0, l ? l->rank : 0);
    }
    const auto n = compare_column(o, rep, std::span(kTop118).subspan(2), 0.02, false);
    o.note("info 118-bus rows 3-15 within 0.02: %zu/13, discordant pairs %zu", n, discordant_pairs(rep, kTop118));
  }
  {
    const auto t0 = Clock::now();
    const auto a = analyse_case(load_case_file(fixtures::data_file("ieee300.cdf")));
    const auto r = rank_lines(a.graph);
    const double secs = seconds_since(t0);
    o.require(secs < 60.0, "300-bus load, power flow, %zu paths and ranking in %.3f s", r.paths.total_paths, secs);
    const auto n = compare_column(o, r.proposed, kTop300, 0.02, false);
    o.note("info 300-bus rows within 0.02: %zu/15, discordant pairs %zu", n, discordant_pairs(r.proposed, kTop300));
  }
  return o;
}

Outcome check_transient_verdicts() {
  Outcome o;
  const auto& a = analysis("ieee30.cdf");
  const auto machines = default_machines(a.merged, a.solution);
  auto run = [&](int x, int y) {
    const auto b = find_branch(a.merged, x, y);
    return simulate_fault(a.merged, a.solution, machines, *b, FaultEnd::from);
  };
  for (const auto& [x, y, unstable] : {std::tuple{1, 2, true}, {1, 3, true}, {6, 7, false}}) {
    const auto tr = run(x, y);
    o.require((tr.verdict == Verdict::unstable) == unstable, "%s cleared at 1 s: %s (expected %s)",
              label(x, y).c_str(), std::string(to_string(tr.verdict)).c_str(), unstable ? "unstable" : "stable");
  }
  int agree = 0, total = 0;
  std::string misses;
  for (const auto& row : kProposed30) {
    const auto tr = run(row.from, row.to);
    ++total;
    if ((tr.verdict == Verdict::unstable) == row.unstable) {
      ++agree;
    } else {
      misses += " " + label(row.from, row.to);
    }
  }
  o.require(agree >= 24, "agreement with the published stability labels: %d/%d (target >= 24)%s%s", agree, total,
            misses.empty() ? "" : ", differ:", misses.c_str());
  return o;
}

Outcome check_property_suites() {
  Outcome o;
  std::mt19937 rng(2024);
  {
    std::uniform_int_distribution<int> size(2, 12);
    int exact = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const auto g = oracles::random_flow_graph(rng, size(rng));
      const auto sources = g.source_ids();
      const auto set = all_shortest_paths(g, sources);
      bool ok = true;
      for (const int s : sources) {
        std::map<int, std::set<std::vector<int>>> got;
        for (const auto& pp : set.pairs) {
          if (pp.source == s) got[pp.target].insert(pp.paths.begin(), pp.paths.end());
        }
        ok = ok && got == oracles::dfs_shortest_paths(g, s, 1e-9);
      }
      exact += ok;
    }
    o.require(exact == 200, "shortest-path sets equal exhaustive enumeration: %d/200 graphs", exact);
  }
  {
    std::uniform_int_distribution<int> size(4, 12);
    int graphs = 0, invariant = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const auto g = oracles::random_flow_graph(rng, size(rng));
      const auto set = all_shortest_paths(g, g.source_ids());
      const auto raw = line_betweenness(set, g);
      if (std::all_of(raw.begin(), raw.end(), [](double v) { return v == 0.0; })) continue;
      ++graphs;
      const auto base = normalize_and_rank(g, raw, 0.5, Approach::proposed);
      bool ok = true;
      for (const double k : {0.5, 2.0, 10.0}) {
        auto scaled = g;
        for (auto& e : scaled.edges) e.p_flow *= k;
        const auto rep = normalize_and_rank(scaled, line_betweenness(set, scaled), 0.5, Approach::proposed);
        for (std::size_t i = 0; i < rep.lines.size(); ++i) {
          ok = ok && rep.lines[i].from == base.lines[i].from && rep.lines[i].to == base.lines[i].to &&
               std::abs(rep.lines[i].normalized - base.lines[i].normalized) <= 1e-12;
        }
      }
      invariant += ok;
    }
    o.require(graphs > 0 && invariant == graphs, "flow scaling k in {0.5, 2, 10} leaves rankings unchanged: %d/%d",
              invariant, graphs);
  }
  {
    auto net = init_smib(0.8, 1.0, 1.0, 0.5, 5.0, 50.0);
    net.delta0[0] += 0.6;
    const auto tr = simulate(net, {0.0, 5.0, 1e-3, std::numbers::pi});
    const double e0 = oracles::smib_energy(tr.delta[0][0], tr.omega[0][0], 0.8, 2.0, 5.0, 50.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      worst = std::max(worst, std::abs(oracles::smib_energy(tr.delta[0][k], tr.omega[0][k], 0.8, 2.0, 5.0, 50.0) - e0));
    }
    o.require(worst / std::abs(e0) <= 1e-5, "SMIB energy drift %.2e relative (limit 1e-5)", worst / std::abs(e0));

    net.delta0[0] -= 0.1;
    auto end_angle = [&](double dt) { return simulate(net, {0.0, 1.0, dt, std::numbers::pi}).delta[0].back(); };
    const double ref = end_angle(1.0 / 3200.0);
    const double e1 = std::abs(end_angle(1.0 / 50.0) - ref);
    const double e2 = std::abs(end_angle(1.0 / 100.0) - ref);
    o.require(std::log2(e1 / e2) >= 3.5, "RK4 observed order %.2f (limit 3.5)", std::log2(e1 / e2));
  }
  {
    double worst = 0.0;
    for (const auto& row : kTopology) {
      const auto& a = analysis(row.file);
      double injected = 0.0, lost = shunt_losses(a.merged, a.solution);
      for (const double p : a.solution.p_inj) injected += p;
      for (const auto& f : a.flows) lost += f.loss;
      worst = std::max(worst, std::abs(injected - lost));
    }
    o.require(worst <= 1e-6, "power balance residual %.2e pu over the four cases (limit 1e-6)", worst);
  }
  {
    std::uniform_int_distribution<int> size(2, 12);
    int ok_count = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const int n = size(rng);
      const auto links = oracles::random_links(rng, n, 0.35);
      SystemCase c;
      for (int i = 1; i <= n; ++i) {
        BusRecord b;
        b.id = i;
        c.buses.push_back(b);
      }
      for (const auto& [x, y] : links) c.branches.push_back({x, y, 0.0, 0.1, 0.0, 1.0, 1});
      const auto t = topology_view(c);
      const auto d = degrees(t);
      long sum = 0;
      for (const int v : d.degree) sum += v;
      const auto cc = clustering(t);
      const auto want = oracles::clustering(n, links);
      bool ok = sum == 2 * static_cast<long>(links.size());
      for (int i = 0; i < n; ++i) ok = ok && std::abs(cc.per_node[i] - want[i]) <= 1e-15;
      ok_count += ok;
    }
    o.require(ok_count == 200, "handshake and brute-force clustering: %d/200 graphs", ok_count);
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "topology reproduction (nodes, edges, average degree)", check_topology_reproduction},
      {2, "degree tables and hub", check_degree_tables},
      {3, "clustering, characteristic path length, diameter", check_clustering_paths},
      {4, "weight matrix values and orientations", check_weight_matrix},
      {5, "proposed betweenness, 30-bus", check_proposed_betweenness},
      {6, "past betweenness, 30-bus", check_past_betweenness_30},
      {7, "generator-shift sensitivity", check_sensitivity},
      {8, "larger systems", check_larger_systems},
      {9, "transient verdicts", check_transient_verdicts},
      {10, "property suites", check_property_suites},
  };
  std::optional<int> only;
  if (argc > 1) only = std::atoi(argv[1]);

  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (only && *only != c.id) continue;
    ++ran;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail.push_back(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("%s %2d  %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0));
    for (const auto& d : o.detail) std::printf("        %s\n", d.c_str());
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %s\n", argv[1]);
    return 2;
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
