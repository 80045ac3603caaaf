#include "gridrank/transient.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"

#include "gridrank/error.hpp"
#include "gridrank/graph.hpp"

namespace gridrank {

namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Union-find over bus positions.
struct Components {
  std::vector<std::size_t> parent;
  explicit Components(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void join(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

struct StateSpec {
  std::optional<std::size_t> grounded;
  std::optional<std::size_t> removed_branch;
};

}  // namespace

std::vector<MachineParams> default_machines(const SystemCase& system, const PowerFlowSolution& solution) {
  std::vector<MachineParams> out;
  for (const int id : source_nodes(system)) {
    const auto i = *system.bus_index(id);
    MachineParams m;
    m.bus = id;
    const double p_g = solution.p_inj[i] + system.buses[i].p_load;
    m.mva_base = std::max(p_g * system.base_mva, 1.0);
    out.push_back(m);
  }
  return out;
}

std::vector<MachineParams> parse_machine_file(std::string_view text, double default_mva_base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("machine file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("$", "top level must be an object keyed by bus id");
  static const std::set<std::string> allowed{"h", "xd_prime", "damping", "f0", "mva_base"};
  std::vector<MachineParams> out;
  for (const auto& [key, value] : doc.items()) {
    const auto path = "$." + key;
    MachineParams m;
    try {
      std::size_t used = 0;
      m.bus = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw SchemaError(path, "key is not a bus id");
    }
    if (!value.is_object()) throw SchemaError(path, "must be an object");
    for (const auto& [field, v] : value.items()) {
      if (!allowed.contains(field)) throw SchemaError(path + "." + field, "unknown field");
      if (!v.is_number()) throw SchemaError(path + "." + field, "must be a number");
    }
    auto num = [&](const char* name, double fallback) {
      return value.contains(name) ? value.at(name).get<double>() : fallback;
    };
    m.h = num("h", m.h);
    m.xd_prime = num("xd_prime", m.xd_prime);
    m.damping = num("damping", m.damping);
    m.f0 = num("f0", m.f0);
    m.mva_base = num("mva_base", default_mva_base);
    if (!(m.h > 0.0)) throw SchemaError(path + ".h", "must be positive");
    if (!(m.xd_prime > 0.0)) throw SchemaError(path + ".xd_prime", "must be positive");
    if (!(m.f0 > 0.0)) throw SchemaError(path + ".f0", "must be positive");
    if (!(m.mva_base > 0.0)) throw SchemaError(path + ".mva_base", "must be positive");
    out.push_back(m);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.bus < b.bus; });
  return out;
}

std::string emit_machine_file(const std::vector<MachineParams>& machines) {
  json doc = json::object();
  for (const auto& m : machines) {
    doc[std::to_string(m.bus)] = {
        {"h", m.h}, {"xd_prime", m.xd_prime}, {"damping", m.damping}, {"f0", m.f0}, {"mva_base", m.mva_base}};
  }
  return doc.dump(2) + "\n";
}

std::vector<MachineParams> load_machine_file(const std::filesystem::path& path, double default_mva_base) {
  return parse_machine_file(read_text_file(path), default_mva_base);
}

const Eigen::MatrixXcd& ReducedNetwork::matrix(NetworkState state) const {
  switch (state) {
    case NetworkState::pre_fault:
      return y_pre;
    case NetworkState::fault_on:
      return y_fault;
    case NetworkState::post_clearing:
      break;
  }
  return y_post;
}

ReducedNetwork init_classical(const SystemCase& system, const PowerFlowSolution& solution,
                              const std::vector<MachineParams>& machines,
                              const std::optional<Disturbance>& disturbance) {
  const std::size_t nb = system.buses.size();
  if (solution.v_mag.size() != nb) throw ValidationError("solution does not match the case");
  if (machines.empty()) throw ValidationError("no machines given");

  std::map<int, std::size_t> by_bus;
  for (std::size_t k = 0; k < machines.size(); ++k) {
    const auto& m = machines[k];
    if (!system.bus_index(m.bus)) throw ValidationError("machine at unknown bus " + std::to_string(m.bus));
    if (!by_bus.emplace(m.bus, k).second) throw ValidationError("two machines at bus " + std::to_string(m.bus));
    if (!(m.h > 0.0) || !(m.xd_prime > 0.0) || !(m.f0 > 0.0) || !(m.mva_base > 0.0)) {
      throw ValidationError("machine at bus " + std::to_string(m.bus) + " has non-positive parameters");
    }
  }
  for (const int id : source_nodes(system)) {
    if (!by_bus.contains(id)) throw ValidationError("generating bus " + std::to_string(id) + " has no machine");
  }
  const int slack_bus = system.buses[system.slack_index()].id;

  const std::size_t m = machines.size();
  ReducedNetwork net;
  std::vector<std::size_t> terminal(m);
  std::vector<Complex> y_machine(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& mp = machines[k];
    const auto i = *system.bus_index(mp.bus);
    terminal[k] = i;
    const double scale = mp.mva_base / system.base_mva;
    const double xd = mp.xd_prime / scale;
    y_machine[k] = 1.0 / Complex(0.0, xd);

    const auto& bus = system.buses[i];
    const Complex v = std::polar(solution.v_mag[i], solution.v_ang[i]);
    const Complex s_g(solution.p_inj[i] + bus.p_load, solution.q_inj[i] + bus.q_load);
    const Complex e = v + Complex(0.0, xd) * std::conj(s_g / v);
    net.machine_bus.push_back(mp.bus);
    net.e_mag.push_back(std::abs(e));
    net.delta0.push_back(std::arg(e));
    net.p_m.push_back(s_g.real());
    net.h.push_back(mp.h * scale);
    net.damping.push_back(mp.damping * scale);
    net.f0.push_back(mp.f0);
    if (mp.bus == slack_bus) net.slack_machine = k;
  }
  if (!by_bus.contains(slack_bus)) throw ValidationError("slack bus " + std::to_string(slack_bus) + " has no machine");

  // Network with loads as constant admittances.
  Eigen::MatrixXcd y_load = build_ybus(system).y;
  for (std::size_t i = 0; i < nb; ++i) {
    const auto& bus = system.buses[i];
    Complex s_load = by_bus.contains(bus.id) ? Complex(bus.p_load, bus.q_load)
                                             : -Complex(solution.p_inj[i], solution.q_inj[i]);
    y_load(i, i) += std::conj(s_load) / (solution.v_mag[i] * solution.v_mag[i]);
  }
  for (std::size_t k = 0; k < m; ++k) y_load(terminal[k], terminal[k]) += y_machine[k];

  auto reduce = [&](const StateSpec& spec, std::vector<int>* islanded) {
    Eigen::MatrixXcd ybb = y_load;
    Components comp(nb);
    for (std::size_t b = 0; b < system.branches.size(); ++b) {
      const auto& br = system.branches[b];
      const auto f = *system.bus_index(br.from_bus);
      const auto t = *system.bus_index(br.to_bus);
      if (spec.removed_branch && *spec.removed_branch == b) {
        const auto s = branch_stamp(br);
        ybb(f, f) -= s.ff;
        ybb(f, t) -= s.ft;
        ybb(t, f) -= s.tf;
        ybb(t, t) -= s.tt;
        continue;
      }
      if (spec.grounded && (*spec.grounded == f || *spec.grounded == t)) continue;
      comp.join(f, t);
    }
    std::set<std::size_t> energised;
    for (std::size_t k = 0; k < m; ++k) {
      if (!spec.grounded || *spec.grounded != terminal[k]) energised.insert(comp.find(terminal[k]));
    }
    std::vector<std::size_t> keep;
    std::vector<long> pos(nb, -1);
    for (std::size_t i = 0; i < nb; ++i) {
      if (spec.grounded && *spec.grounded == i) continue;
      if (!energised.contains(comp.find(i))) continue;
      pos[i] = static_cast<long>(keep.size());
      keep.push_back(i);
    }
    const auto nk = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXcd kk(nk, nk);
    for (Eigen::Index a = 0; a < nk; ++a) {
      for (Eigen::Index b = 0; b < nk; ++b) kk(a, b) = ybb(keep[a], keep[b]);
    }
    Eigen::MatrixXcd km = Eigen::MatrixXcd::Zero(nk, static_cast<Eigen::Index>(m));
    Eigen::MatrixXcd ymm = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
      ymm(k, k) = y_machine[k];
      if (pos[terminal[k]] >= 0) km(pos[terminal[k]], k) = -y_machine[k];
    }
    Eigen::MatrixXcd red = ymm;
    if (nk > 0) {
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(kk);
      red -= km.transpose() * lu.solve(km);
    }
    if (islanded != nullptr) {
      const auto home = comp.find(terminal[net.slack_machine]);
      for (std::size_t k = 0; k < m; ++k) {
        if (comp.find(terminal[k]) != home) islanded->push_back(net.machine_bus[k]);
      }
    }
    return red;
  };

  net.y_pre = reduce({}, nullptr);
  if (disturbance) {
    const auto g = system.bus_index(disturbance->fault_bus);
    if (!g) throw ValidationError("fault bus " + std::to_string(disturbance->fault_bus) + " does not exist");
    if (disturbance->removed_branch >= system.branches.size()) throw ValidationError("removed branch out of range");
    net.y_fault = reduce({g, std::nullopt}, nullptr);
    net.y_post = reduce({std::nullopt, disturbance->removed_branch}, &net.islanded);
  } else {
    net.y_fault = net.y_pre;
    net.y_post = net.y_pre;
  }
  return net;
}

ReducedNetwork init_smib(double p_m, double e, double v_inf, double x, double h, double f0, double damping) {
  ReducedNetwork net;
  net.machine_bus = {1, 2};
  net.e_mag = {e, v_inf};
  const double s = p_m * x / (e * v_inf);
  if (std::abs(s) > 1.0) throw ValidationError("no equilibrium: P_m exceeds the transfer limit");
  net.delta0 = {std::asin(s), 0.0};
  net.p_m = {p_m, -p_m};
  net.h = {h, kInf};
  net.damping = {damping, 0.0};
  net.f0 = {f0, f0};
  net.slack_machine = 1;
  const Complex y = 1.0 / Complex(0.0, x);
  Eigen::MatrixXcd red(2, 2);
  red << y, -y, -y, y;
  net.y_pre = net.y_fault = net.y_post = red;
  return net;
}

Eigen::VectorXd electrical_power(const ReducedNetwork& net, NetworkState state, const Eigen::VectorXd& delta) {
  const auto m = static_cast<Eigen::Index>(net.size());
  Eigen::VectorXcd e(m);
  for (Eigen::Index k = 0; k < m; ++k) e(k) = std::polar(net.e_mag[k], delta(k));
  const Eigen::VectorXcd i = net.matrix(state) * e;
  Eigen::VectorXd p(m);
  for (Eigen::Index k = 0; k < m; ++k) p(k) = (e(k) * std::conj(i(k))).real();
  return p;
}

Eigen::VectorXd swing_rhs(const Eigen::VectorXd& state, const ReducedNetwork& net, NetworkState kind) {
  const auto m = static_cast<Eigen::Index>(net.size());
  const Eigen::VectorXd p_e = electrical_power(net, kind, state.head(m));
  Eigen::VectorXd out(2 * m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double w = state(m + k);
    out(k) = w;
    if (std::isinf(net.h[k])) {
      out(m + k) = 0.0;
    } else {
      out(m + k) = std::numbers::pi * net.f0[k] / net.h[k] * (net.p_m[k] - p_e(k) - net.damping[k] * w);
    }
  }
  return out;
}

std::string_view to_string(Verdict v) { return v == Verdict::stable ? "stable" : "unstable"; }

double SwingTrajectory::relative_angle(std::size_t machine, std::size_t k) const {
  return delta[machine][k] - delta[slack_machine][k];
}

SwingTrajectory simulate(const ReducedNetwork& net, const SimOptions& options) {
  if (!(options.dt > 0.0)) throw ValidationError("dt must be positive");
  if (!(options.t_clear >= 0.0) || !(options.t_end > options.t_clear)) {
    throw ValidationError("need 0 <= t_clear < t_end");
  }
  const auto m = static_cast<Eigen::Index>(net.size());
  const long clear_step = std::lround(options.t_clear / options.dt);
  const long steps = std::lround(options.t_end / options.dt);

  SwingTrajectory tr;
  tr.machine_bus = net.machine_bus;
  tr.slack_machine = net.slack_machine;
  tr.t_clear = options.t_clear;
  tr.islanded = net.islanded;
  tr.delta.assign(m, {});
  tr.omega.assign(m, {});
  for (auto& d : tr.delta) d.reserve(steps + 1);
  for (auto& w : tr.omega) w.reserve(steps + 1);
  tr.times.reserve(steps + 1);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * m);
  for (Eigen::Index k = 0; k < m; ++k) x(k) = net.delta0[k];
  auto record = [&](long step) {
    tr.times.push_back(static_cast<double>(step) * options.dt);
    for (Eigen::Index k = 0; k < m; ++k) {
      tr.delta[k].push_back(x(k));
      tr.omega[k].push_back(x(m + k));
    }
  };
  record(0);
  const double h = options.dt;
  for (long step = 0; step < steps; ++step) {
    const auto kind = step < clear_step ? NetworkState::fault_on : NetworkState::post_clearing;
    const Eigen::VectorXd k1 = swing_rhs(x, net, kind);
    const Eigen::VectorXd k2 = swing_rhs(x + 0.5 * h * k1, net, kind);
    const Eigen::VectorXd k3 = swing_rhs(x + 0.5 * h * k2, net, kind);
    const Eigen::VectorXd k4 = swing_rhs(x + h * k3, net, kind);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    record(step + 1);
  }
  verdict(tr, options.threshold);
  return tr;
}

Verdict verdict(SwingTrajectory& tr, double threshold) {
  tr.first_divergence_time.reset();
  tr.max_excursion = 0.0;
  const std::size_t m = tr.delta.size();
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    if (!(tr.times[k] > tr.t_clear)) continue;
    for (std::size_t i = 0; i < m; ++i) {
      const double excursion = std::abs(tr.relative_angle(i, k) - tr.relative_angle(i, 0));
      tr.max_excursion = std::max(tr.max_excursion, excursion);
      if (excursion > threshold && !tr.first_divergence_time) tr.first_divergence_time = tr.times[k];
    }
  }
  tr.verdict = tr.first_divergence_time || !tr.islanded.empty() ? Verdict::unstable : Verdict::stable;
  return tr.verdict;
}

std::optional<std::size_t> find_branch(const SystemCase& system, int a, int b) {
  for (std::size_t k = 0; k < system.branches.size(); ++k) {
    const auto& br = system.branches[k];
    if ((br.from_bus == a && br.to_bus == b) || (br.from_bus == b && br.to_bus == a)) return k;
  }
  return std::nullopt;
}

SwingTrajectory simulate_fault(const SystemCase& system, const PowerFlowSolution& solution,
                               const std::vector<MachineParams>& machines, std::size_t branch, FaultEnd end,
                               const SimOptions& options) {
  if (branch >= system.branches.size()) throw ValidationError("branch index out of range");
  if (!(options.t_clear > 0.0)) throw ValidationError("clearing time must be positive");
  const auto& br = system.branches[branch];
  const Disturbance d{end == FaultEnd::from ? br.from_bus : br.to_bus, branch};
  const auto net = init_classical(system, solution, machines, d);
  return simulate(net, options);
}

std::string trajectory_csv(const SwingTrajectory& tr, std::size_t stride) {
  if (stride == 0) stride = 1;
  std::string out = "t";
  for (const int b : tr.machine_bus) out += ",delta_" + std::to_string(b);
  for (const int b : tr.machine_bus) out += ",dw_" + std::to_string(b);
  for (const int b : tr.machine_bus) out += ",rel_" + std::to_string(b);
  out += "\n";
  char cell[64];
  const std::size_t m = tr.machine_bus.size();
  for (std::size_t k = 0; k < tr.times.size(); k += stride) {
    std::snprintf(cell, sizeof cell, "%.6f", tr.times[k]);
    out += cell;
    for (std::size_t i = 0; i < m; ++i) {
      std::snprintf(cell, sizeof cell, ",%.9g", tr.delta[i][k]);
      out += cell;
    }
    for (std::size_t i = 0; i < m; ++i) {
      std::snprintf(cell, sizeof cell, ",%.9g", tr.omega[i][k]);
      out += cell;
    }
    for (std::size_t i = 0; i < m; ++i) {
      std::snprintf(cell, sizeof cell, ",%.9g", tr.relative_angle(i, k));
      out += cell;
    }
    out += "\n";
  }
  return out;
}

}  // namespace gridrank
