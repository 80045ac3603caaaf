#include "gridrank/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "json.hpp"

namespace gridrank {

std::string_view to_string(Format format) {
  switch (format) {
    case Format::csv:
      return "csv";
    case Format::json:
      return "json";
    case Format::md:
      break;
  }
  return "md";
}

std::optional<Format> format_from_string(std::string_view text) {
  if (text == "csv") return Format::csv;
  if (text == "json") return Format::json;
  if (text == "md") return Format::md;
  return std::nullopt;
}

std::string_view extension(Format format) { return to_string(format); }

Cell text_cell(std::string text) { return {std::move(text), false}; }

Cell int_cell(long long value) { return {std::to_string(value), true}; }

Cell real_cell(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return {s, true};
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string config_line(const Table& t) {
  std::string s = t.name;
  for (const auto& [k, v] : t.config) s += " " + k + "=" + v;
  return s;
}

// Average ranks, 1-based, for Spearman correlation with ties.
std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] > v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  if (a.size() < 2) return 0.0;
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

std::string render(const Table& t, Format format) {
  std::string out;
  switch (format) {
    case Format::csv: {
      out += "# " + config_line(t) + "\n";
      for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + csv_escape(t.columns[c]);
      out += "\n";
      for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + csv_escape(row[c].text);
        out += "\n";
      }
      break;
    }
    case Format::json: {
      nlohmann::ordered_json doc;
      doc["table"] = t.name;
      doc["config"] = nlohmann::ordered_json::object();
      for (const auto& [k, v] : t.config) doc["config"][k] = v;
      doc["columns"] = t.columns;
      doc["rows"] = nlohmann::ordered_json::array();
      for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < row.size() && c < t.columns.size(); ++c) {
          if (row[c].numeric) {
            obj[t.columns[c]] = nlohmann::ordered_json::parse(row[c].text);
          } else {
            obj[t.columns[c]] = row[c].text;
          }
        }
        doc["rows"].push_back(std::move(obj));
      }
      out = doc.dump(2) + "\n";
      break;
    }
    case Format::md: {
      out += "<!-- " + config_line(t) + " -->\n\n";
      out += "|";
      for (const auto& c : t.columns) out += " " + c + " |";
      out += "\n|";
      for (std::size_t c = 0; c < t.columns.size(); ++c) out += "---|";
      out += "\n";
      for (const auto& row : t.rows) {
        out += "|";
        for (const auto& cell : row) out += " " + cell.text + " |";
        out += "\n";
      }
      break;
    }
  }
  return out;
}

std::string line_label(int from, int to) { return "L" + std::to_string(from) + "-" + std::to_string(to); }

Table stats_summary_table(const GraphStats& s) {
  Table t;
  t.name = "stats_summary";
  t.columns = {"parameter", "value"};
  t.rows = {
      {text_cell("Nodes"), int_cell(static_cast<long long>(s.node_count))},
      {text_cell("Edges"), int_cell(static_cast<long long>(s.edge_count))},
      {text_cell("Average Degree of Node"), real_cell(s.average_degree, 2)},
      {text_cell("Hub"), int_cell(s.degrees.hub)},
      {text_cell("Clustering Coefficient"), real_cell(s.clustering.graph, 4)},
      {text_cell("Characteristic Path Length"), real_cell(s.paths.char_path_length, 4)},
      {text_cell("Diameter"), int_cell(s.paths.diameter)},
      {text_cell("Number of Maximum Shortest Path"), int_cell(s.paths.diameter_pair_count)},
  };
  return t;
}

Table degree_table(const GraphStats& s) {
  Table t;
  t.name = "degrees";
  t.columns = {"node", "degree", "in_degree", "out_degree"};
  const auto& d = s.degrees;
  for (std::size_t i = 0; i < d.ids.size(); ++i) {
    t.rows.push_back({int_cell(d.ids[i]), int_cell(d.degree[i]), int_cell(d.in_degree[i]), int_cell(d.out_degree[i])});
  }
  return t;
}

Table histogram_table(const GraphStats& s) {
  Table t;
  t.name = "degree_histogram";
  t.columns = {"degree", "nodes"};
  for (const auto& [deg, count] : s.degrees.histogram) t.rows.push_back({int_cell(deg), int_cell(count)});
  return t;
}

Table clustering_table(const GraphStats& s) {
  Table t;
  t.name = "clustering";
  t.columns = {"node", "clustering"};
  for (std::size_t i = 0; i < s.degrees.ids.size(); ++i) {
    t.rows.push_back({int_cell(s.degrees.ids[i]), real_cell(s.clustering.per_node[i], 4)});
  }
  return t;
}

Table betweenness_table(const BetweennessReport& r) {
  Table t;
  t.name = std::string("betweenness_") + std::string(to_string(r.approach));
  t.columns = {"line", "raw", "normalized", "rank", "critical", "approach"};
  for (const auto& l : r.lines) {
    t.rows.push_back({text_cell(line_label(l.from, l.to)), real_cell(l.raw, 6), real_cell(l.normalized, 4),
                      int_cell(l.rank), text_cell(l.critical ? "yes" : "no"),
                      text_cell(std::string(to_string(r.approach)))});
  }
  return t;
}

std::vector<ComparisonRow> comparison_rows(const FlowGraph& graph, const BetweennessReport& proposed,
                                           const BetweennessReport& past) {
  std::vector<ComparisonRow> rows;
  for (const auto& l : proposed.lines) {
    ComparisonRow row;
    row.from = l.from;
    row.to = l.to;
    row.proposed = l.normalized;
    row.proposed_rank = l.rank;
    row.critical = l.critical;
    if (const auto* p = past.find(l.from, l.to)) {
      row.past = p->normalized;
      row.past_rank = p->rank;
    }
    rows.push_back(row);
  }
  for (const auto& idle : graph.idle) {
    ComparisonRow row;
    row.from = idle.a;
    row.to = idle.b;
    row.idle = true;
    rows.push_back(row);
  }
  return rows;
}

Table comparison_table(const std::vector<ComparisonRow>& rows) {
  Table t;
  t.name = "comparison";
  t.columns = {"line", "proposed", "proposed_rank", "past", "past_rank", "margin_class", "verdict"};
  for (const auto& r : rows) {
    t.rows.push_back({text_cell(line_label(r.from, r.to)), real_cell(r.proposed, 4),
                      r.idle ? text_cell("-") : int_cell(r.proposed_rank), real_cell(r.past, 4),
                      r.idle ? text_cell("-") : int_cell(r.past_rank),
                      text_cell(r.idle ? "idle" : (r.critical ? "critical" : "non-critical")),
                      text_cell(r.verdict ? std::string(to_string(*r.verdict)) : "-")});
  }
  return t;
}

SweepSummary summarise_sweep(const std::vector<ComparisonRow>& rows) {
  SweepSummary s;
  s.lines = rows.size();
  std::vector<double> a, b;
  std::size_t agree = 0, judged = 0;
  for (const auto& r : rows) {
    if (!r.idle) {
      a.push_back(r.proposed);
      b.push_back(r.past);
    }
    if (r.critical) ++s.critical;
    if (r.verdict) {
      ++judged;
      const bool unstable = *r.verdict == Verdict::unstable;
      if (unstable) ++s.unstable;
      if (unstable == r.critical) ++agree;
    }
  }
  s.rank_correlation = pearson(average_ranks(a), average_ranks(b));
  s.agreement = judged == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(judged);
  return s;
}

Table sweep_summary_table(const SweepSummary& s) {
  Table t;
  t.name = "sweep_summary";
  t.columns = {"parameter", "value"};
  t.rows = {
      {text_cell("lines"), int_cell(static_cast<long long>(s.lines))},
      {text_cell("critical"), int_cell(static_cast<long long>(s.critical))},
      {text_cell("unstable"), int_cell(static_cast<long long>(s.unstable))},
      {text_cell("margin_verdict_agreement"), real_cell(s.agreement, 4)},
      {text_cell("rank_correlation_proposed_past"), real_cell(s.rank_correlation, 4)},
  };
  return t;
}

Table verdict_table(int from, int to, int fault_bus, const SwingTrajectory& tr) {
  Table t;
  t.name = "verdict";
  t.columns = {"line", "fault_bus", "t_clear", "verdict", "first_divergence_time", "max_excursion", "islanded"};
  std::string islanded;
  for (const int b : tr.islanded) islanded += (islanded.empty() ? "" : " ") + std::to_string(b);
  t.rows.push_back({text_cell(line_label(from, to)), int_cell(fault_bus), real_cell(tr.t_clear, 3),
                    text_cell(std::string(to_string(tr.verdict))),
                    tr.first_divergence_time ? real_cell(*tr.first_divergence_time, 3) : text_cell("-"),
                    real_cell(tr.max_excursion, 4), text_cell(islanded.empty() ? "-" : islanded)});
  return t;
}

}  // namespace gridrank
