#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridrank/betweenness.hpp"
#include "gridrank/stats.hpp"
#include "gridrank/transient.hpp"

namespace gridrank {

enum class Format { csv, json, md };
std::string_view to_string(Format format);
std::optional<Format> format_from_string(std::string_view text);
std::string_view extension(Format format);

struct Cell {
  std::string text;
  bool numeric = false;
};

Cell text_cell(std::string text);
Cell int_cell(long long value);
/// Fixed-point with `decimals` places.
Cell real_cell(double value, int decimals);

struct Table {
  std::string name;
  std::vector<std::pair<std::string, std::string>> config;  // rendered as a header comment
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string render(const Table& table, Format format);

std::string line_label(int from, int to);

Table stats_summary_table(const GraphStats& stats);
Table degree_table(const GraphStats& stats);
Table histogram_table(const GraphStats& stats);
Table clustering_table(const GraphStats& stats);

Table betweenness_table(const BetweennessReport& report);

struct ComparisonRow {
  int from = 0;
  int to = 0;
  bool idle = false;  // zero-flow link, not ranked
  double proposed = 0.0;
  int proposed_rank = 0;
  double past = 0.0;
  int past_rank = 0;
  bool critical = false;
  std::optional<Verdict> verdict;
};

/// One row per directed edge in proposed-rank order, then the idle links.
std::vector<ComparisonRow> comparison_rows(const FlowGraph& graph, const BetweennessReport& proposed,
                                           const BetweennessReport& past);
Table comparison_table(const std::vector<ComparisonRow>& rows);

struct SweepSummary {
  std::size_t lines = 0;
  double rank_correlation = 0.0;  // Spearman, proposed vs past, ranked lines only
  double agreement = 0.0;         // fraction where critical == unstable
  std::size_t unstable = 0;
  std::size_t critical = 0;
};

SweepSummary summarise_sweep(const std::vector<ComparisonRow>& rows);
Table sweep_summary_table(const SweepSummary& summary);

Table verdict_table(int from, int to, int fault_bus, const SwingTrajectory& trajectory);

}  // namespace gridrank
