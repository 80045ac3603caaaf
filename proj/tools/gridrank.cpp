// Command-line front end: stats | rank | simulate | sweep | sensitivity.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "gridrank/betweenness.hpp"
#include "gridrank/error.hpp"
#include "gridrank/report.hpp"
#include "gridrank/stats.hpp"
#include "gridrank/transient.hpp"

namespace fs = std::filesystem;
using namespace gridrank;

namespace {

struct Config {
  std::string case_path;
  double margin = 0.5;
  double tie_tol = 1e-9;
  double pf_tol = 1e-8;
  int max_iter = 50;
  double t_clear = 1.0;
  double t_end = 10.0;
  double dt = 1e-3;
  double threshold = std::numbers::pi;
  std::string machines;
  std::string out_dir;
  std::string format = "csv";
  std::string cost = "magnitude";
  std::string accumulation = "per-path";
  std::string fault_end = "from";
  std::string line;
  std::string move_gen;
  unsigned jobs = 0;
  std::size_t stride = 1;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::pair<int, int> parse_pair(const std::string& text, char sep, const char* flag) {
  const auto pos = text.find(sep);
  try {
    if (pos == std::string::npos) throw std::invalid_argument(text);
    std::size_t a_used = 0, b_used = 0;
    const std::string a = text.substr(0, pos), b = text.substr(pos + 1);
    const int x = std::stoi(a, &a_used);
    const int y = std::stoi(b, &b_used);
    if (a_used != a.size() || b_used != b.size()) throw std::invalid_argument(text);
    return {x, y};
  } catch (const std::exception&) {
    throw UsageError(std::string(flag) + " expects A" + sep + "B, got '" + text + "'");
  }
}

struct Pipeline {
  Config cfg;
  SystemCase input;
  Analysis analysis;
  Format format = Format::csv;
  BetweennessOptions bopts;
  std::string stem;

  explicit Pipeline(const Config& c) : cfg(c) {
    if (cfg.case_path.empty()) throw UsageError("--case needs a path");
    if (!(cfg.margin > 0.0 && cfg.margin < 1.0)) throw UsageError("--margin must lie in (0, 1)");
    if (!(cfg.tie_tol >= 0.0) || !(cfg.pf_tol > 0.0) || !(cfg.dt > 0.0)) {
      throw UsageError("tolerances and step sizes must be positive");
    }
    const auto f = format_from_string(cfg.format);
    if (!f) throw UsageError("--format must be csv, json or md");
    format = *f;
    const auto cost = cost_scalar_from_string(cfg.cost);
    if (!cost) throw UsageError("--cost must be magnitude or reactance");
    if (cfg.accumulation != "per-path" && cfg.accumulation != "per-pair") {
      throw UsageError("--accumulation must be per-path or per-pair");
    }
    if (cfg.out_dir.empty()) {
      if (const char* env = std::getenv("GRIDRANK_OUT")) cfg.out_dir = env;
    }
    stem = fs::path(cfg.case_path).stem().string();

    input = load_case_file(cfg.case_path);
    if (!cfg.move_gen.empty()) {
      const auto [from, to] = parse_pair(cfg.move_gen, ':', "--move-gen");
      input = shift_generator(input, from, to);
      stem += "_gen" + std::to_string(from) + "to" + std::to_string(to);
    }
    AnalysisOptions aopts;
    aopts.power_flow.tol = cfg.pf_tol;
    aopts.power_flow.max_iter = cfg.max_iter;
    aopts.graph.cost = *cost;
    analysis = analyse_case(input, aopts);

    bopts.paths.tie_tol = cfg.tie_tol;
    bopts.margin = cfg.margin;
    bopts.accumulation = cfg.accumulation == "per-pair" ? Accumulation::per_pair : Accumulation::per_path;
  }

  std::vector<std::pair<std::string, std::string>> provenance(bool with_sim) const {
    std::vector<std::pair<std::string, std::string>> c{
        {"case", fs::path(cfg.case_path).filename().string()},
        {"margin", fmt_real(cfg.margin)},
        {"tie_tol", fmt_real(cfg.tie_tol)},
        {"cost", cfg.cost},
        {"accumulation", cfg.accumulation},
    };
    if (!cfg.move_gen.empty()) c.emplace_back("move_gen", cfg.move_gen);
    if (with_sim) {
      c.emplace_back("machines", cfg.machines.empty() ? "default(H=5,xd_prime=0.2,D=0,f0=50,rated_at_Pg)"
                                                      : fs::path(cfg.machines).filename().string());
      c.emplace_back("t_clear", fmt_real(cfg.t_clear));
      c.emplace_back("t_end", fmt_real(cfg.t_end));
      c.emplace_back("dt", fmt_real(cfg.dt));
      c.emplace_back("fault_end", cfg.fault_end);
    }
    return c;
  }

  std::vector<MachineParams> machines() const {
    if (cfg.machines.empty()) return default_machines(analysis.merged, analysis.solution);
    return load_machine_file(cfg.machines, analysis.merged.base_mva);
  }

  SimOptions sim_options() const {
    SimOptions o;
    o.t_clear = cfg.t_clear;
    o.t_end = cfg.t_end;
    o.dt = cfg.dt;
    o.threshold = cfg.threshold;
    return o;
  }

  FaultEnd fault_end() const {
    if (cfg.fault_end == "from") return FaultEnd::from;
    if (cfg.fault_end == "to") return FaultEnd::to;
    throw UsageError("--fault-end must be from or to");
  }

  void write_file(const std::string& name, const std::string& body) const {
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw Error("cannot write '" + path.string() + "'");
    std::cerr << "wrote " << path.string() << "\n";
  }

  void emit(Table table, bool with_sim = false) const {
    table.config = provenance(with_sim);
    const auto body = render(table, format);
    if (cfg.out_dir.empty()) {
      std::cout << body << "\n";
    } else {
      write_file(stem + "_" + table.name + "." + std::string(extension(format)), body);
    }
  }
};

int cmd_stats(const Config& cfg) {
  Pipeline p(cfg);
  const auto topo = topology_view(p.input);
  const auto stats = compute_stats(topo, p.analysis.graph);
  p.emit(stats_summary_table(stats));
  p.emit(degree_table(stats));
  p.emit(histogram_table(stats));
  p.emit(clustering_table(stats));
  return 0;
}

int cmd_rank(const Config& cfg) {
  Pipeline p(cfg);
  const auto r = rank_lines(p.analysis.graph, p.bopts);
  p.emit(betweenness_table(r.proposed));
  p.emit(betweenness_table(r.past));
  p.emit(comparison_table(comparison_rows(p.analysis.graph, r.proposed, r.past)));
  return 0;
}

int cmd_simulate(const Config& cfg) {
  if (cfg.line.empty()) throw UsageError("simulate needs --line A-B");
  const auto [a, b] = parse_pair(cfg.line, '-', "--line");
  Pipeline p(cfg);
  const auto branch = find_branch(p.analysis.merged, a, b);
  if (!branch) throw ValidationError("line " + cfg.line + " is not in the case");
  const auto end = p.fault_end();
  const auto tr = simulate_fault(p.analysis.merged, p.analysis.solution, p.machines(), *branch, end, p.sim_options());
  const auto& br = p.analysis.merged.branches[*branch];
  p.emit(verdict_table(br.from_bus, br.to_bus, end == FaultEnd::from ? br.from_bus : br.to_bus, tr), true);
  if (!p.cfg.out_dir.empty()) {
    p.write_file(p.stem + "_trajectory_" + line_label(br.from_bus, br.to_bus) + ".csv",
                 trajectory_csv(tr, p.cfg.stride));
  }
  return 0;
}

int cmd_sweep(const Config& cfg) {
  Pipeline p(cfg);
  const auto r = rank_lines(p.analysis.graph, p.bopts);
  auto rows = comparison_rows(p.analysis.graph, r.proposed, r.past);
  const auto machines = p.machines();
  const auto opts = p.sim_options();
  const auto end = p.fault_end();
  const auto& merged = p.analysis.merged;

  std::vector<std::size_t> branch(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) branch[k] = *find_branch(merged, rows[k].from, rows[k].to);

  std::vector<std::optional<Verdict>> verdicts(rows.size());
  std::vector<std::string> failures(rows.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) {
      try {
        verdicts[k] = simulate_fault(merged, p.analysis.solution, machines, branch[k], end, opts).verdict;
      } catch (const std::exception& e) {
        failures[k] = e.what();
      }
    }
  };
  unsigned jobs = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(rows.size()));
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (!failures[k].empty()) throw Error(line_label(rows[k].from, rows[k].to) + ": " + failures[k]);
    rows[k].verdict = verdicts[k];
  }

  p.emit(comparison_table(rows), true);
  p.emit(sweep_summary_table(summarise_sweep(rows)), true);
  return 0;
}

int cmd_sensitivity(const Config& cfg) {
  if (cfg.move_gen.empty()) throw UsageError("sensitivity needs --move-gen A:B");
  Pipeline p(cfg);
  const auto r = rank_lines(p.analysis.graph, p.bopts);
  p.emit(betweenness_table(r.proposed));
  return 0;
}

void add_shared(CLI::App* sub, Config& cfg) {
  sub->add_option("--case", cfg.case_path, "Case file (.json native, otherwise IEEE CDF)")->required();
  sub->add_option("--margin", cfg.margin, "Criticality margin on normalized betweenness")->capture_default_str();
  sub->add_option("--tie-tol", cfg.tie_tol, "Relative tie tolerance on path cost")->capture_default_str();
  sub->add_option("--pf-tol", cfg.pf_tol, "Power-flow mismatch tolerance, pu")->capture_default_str();
  sub->add_option("--max-iter", cfg.max_iter, "Power-flow iteration limit")->capture_default_str();
  sub->add_option("--clear-time", cfg.t_clear, "Fault clearing time, s")->capture_default_str();
  sub->add_option("--end-time", cfg.t_end, "Simulation end time, s")->capture_default_str();
  sub->add_option("--dt", cfg.dt, "Integration step, s")->capture_default_str();
  sub->add_option("--threshold", cfg.threshold, "Instability threshold on relative angle, rad");
  sub->add_option("--machines", cfg.machines, "Machine parameter file (JSON keyed by bus id)");
  sub->add_option("--out", cfg.out_dir, "Output directory (default: $GRIDRANK_OUT, else stdout)");
  sub->add_option("--format", cfg.format, "csv, json or md")->capture_default_str();
  sub->add_option("--cost", cfg.cost, "Path cost scalar: magnitude or reactance")->capture_default_str();
  sub->add_option("--accumulation", cfg.accumulation, "per-path or per-pair")->capture_default_str();
  sub->add_option("--fault-end", cfg.fault_end, "Faulted end of the line: from or to")->capture_default_str();
  sub->add_option("--move-gen", cfg.move_gen, "Move generation A:B before analysis");
  sub->add_option("--jobs", cfg.jobs, "Worker threads for sweep (0 = all cores)");
  sub->add_option("--stride", cfg.stride, "Keep every n-th trajectory sample")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-weighted line betweenness and transient screening"};
  app.require_subcommand(1);
  Config cfg;
  auto* stats = app.add_subcommand("stats", "Degree, clustering and path-length statistics");
  auto* rank = app.add_subcommand("rank", "Proposed and past betweenness rankings");
  auto* simulate = app.add_subcommand("simulate", "Fault one line and integrate the swing equations");
  auto* sweep = app.add_subcommand("sweep", "Rankings joined with a simulated verdict for every line");
  auto* sensitivity = app.add_subcommand("sensitivity", "Ranking after moving a generator");
  for (auto* sub : {stats, rank, simulate, sweep, sensitivity}) add_shared(sub, cfg);
  simulate->add_option("--line", cfg.line, "Faulted line A-B")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (stats->parsed()) return cmd_stats(cfg);
    if (rank->parsed()) return cmd_rank(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg);
    return cmd_sensitivity(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
