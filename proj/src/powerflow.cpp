#include "gridrank/powerflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "gridrank/error.hpp"

namespace gridrank {

namespace {

constexpr double kPivotFloor = 1e-12;

std::size_t index_of(const SystemCase& system, int id) {
  auto idx = system.bus_index(id);
  if (!idx) throw ValidationError("unknown bus " + std::to_string(id));
  return *idx;
}

}  // namespace

BranchStamp branch_stamp(const BranchRecord& br) {
  const Complex z(br.r, br.x);
  if (std::abs(z) == 0.0) {
    throw SingularError("branch " + std::to_string(br.from_bus) + "-" + std::to_string(br.to_bus) +
                            " has zero series impedance",
                        br.from_bus);
  }
  const Complex ys = 1.0 / z;
  const Complex half_b(0.0, br.b_charging / 2.0);
  const double tap = br.tap_ratio;
  BranchStamp s;
  s.ff = (ys + half_b) / (tap * tap);
  s.ft = -ys / tap;
  s.tf = -ys / tap;
  s.tt = ys + half_b;
  return s;
}

AdmittanceMatrix build_ybus(const SystemCase& system) {
  const std::size_t n = system.buses.size();
  AdmittanceMatrix out;
  out.y = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  out.bus_ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& bus = system.buses[i];
    out.bus_ids.push_back(bus.id);
    out.y(i, i) += Complex(bus.shunt_g, bus.shunt_b);
  }
  for (const auto& br : system.branches) {
    const auto f = static_cast<Eigen::Index>(index_of(system, br.from_bus));
    const auto t = static_cast<Eigen::Index>(index_of(system, br.to_bus));
    const auto s = branch_stamp(br);
    out.y(f, f) += s.ff;
    out.y(f, t) += s.ft;
    out.y(t, f) += s.tf;
    out.y(t, t) += s.tt;
  }
  return out;
}

PowerFlowSolution solve_power_flow(const SystemCase& system, const PowerFlowOptions& options) {
  if (!(options.tol > 0.0)) throw ValidationError("power flow tolerance must be positive");
  if (options.max_iter < 0) throw ValidationError("max_iter must be non-negative");
  validate(system);

  const auto ybus = build_ybus(system);
  const Eigen::MatrixXcd& y = ybus.y;
  const std::size_t n = system.buses.size();
  const std::size_t slack = system.slack_index();

  std::vector<double> vm(n, 1.0), va(n, 0.0);
  Eigen::VectorXd p_spec(n), q_spec(n);
  std::vector<std::size_t> pvpq, pq;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& bus = system.buses[i];
    if (bus.kind != BusKind::pq) vm[i] = bus.v_mag;
    if (bus.kind != BusKind::slack) pvpq.push_back(i);
    if (bus.kind == BusKind::pq) pq.push_back(i);
    p_spec(i) = bus.p_gen - bus.p_load;
    q_spec(i) = bus.q_gen - bus.q_load;
  }
  va[slack] = system.buses[slack].v_ang_deg * std::numbers::pi / 180.0;

  const auto npv = static_cast<Eigen::Index>(pvpq.size());
  const auto npq = static_cast<Eigen::Index>(pq.size());
  const Eigen::Index dim = npv + npq;

  Eigen::VectorXcd v(n);
  auto refresh = [&] {
    for (std::size_t i = 0; i < n; ++i) v(i) = std::polar(vm[i], va[i]);
  };

  // Mismatch vector ordered [P over pvpq, Q over pq].
  auto mismatch = [&](Eigen::VectorXcd& s_calc) {
    s_calc = v.cwiseProduct((y * v).conjugate());
    Eigen::VectorXd f(dim);
    for (Eigen::Index k = 0; k < npv; ++k) f(k) = s_calc(pvpq[k]).real() - p_spec(pvpq[k]);
    for (Eigen::Index k = 0; k < npq; ++k) f(npv + k) = s_calc(pq[k]).imag() - q_spec(pq[k]);
    return f;
  };

  auto bus_of_unknown = [&](Eigen::Index k) {
    return system.buses[k < npv ? pvpq[k] : pq[k - npv]].id;
  };

  PowerFlowSolution sol;
  refresh();
  Eigen::VectorXcd s_calc;
  Eigen::VectorXd f = mismatch(s_calc);
  int iter = 0;
  while (true) {
    const double norm = dim == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
    sol.mismatch_history.push_back(norm);
    if (norm <= options.tol) {
      sol.converged = true;
      sol.max_mismatch = norm;
      break;
    }
    if (iter >= options.max_iter || !std::isfinite(norm)) {
      std::ostringstream msg;
      msg << "power flow did not converge in " << iter << " iterations (max mismatch " << norm << " pu)";
      throw ConvergenceError(msg.str(), sol.mismatch_history);
    }

    // dS/dVa and dS/dVm in complex form.
    const Eigen::VectorXcd ibus = y * v;
    Eigen::VectorXcd v_unit(n);
    for (std::size_t i = 0; i < n; ++i) v_unit(i) = v(i) / vm[i];
    const Eigen::MatrixXcd d_va =
        Complex(0, 1) * v.asDiagonal() * (Eigen::MatrixXcd(ibus.asDiagonal()) - y * v.asDiagonal()).conjugate();
    const Eigen::MatrixXcd d_vm = v.asDiagonal() * (y * v_unit.asDiagonal()).conjugate() +
                                  Eigen::MatrixXcd(ibus.conjugate().asDiagonal()) * v_unit.asDiagonal();

    Eigen::MatrixXd jac(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      const bool p_row = r < npv;
      const std::size_t bus = p_row ? pvpq[r] : pq[r - npv];
      for (Eigen::Index c = 0; c < npv; ++c) {
        const Complex d = d_va(bus, pvpq[c]);
        jac(r, c) = p_row ? d.real() : d.imag();
      }
      for (Eigen::Index c = 0; c < npq; ++c) {
        const Complex d = d_vm(bus, pq[c]);
        jac(r, npv + c) = p_row ? d.real() : d.imag();
      }
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    const Eigen::MatrixXd& packed = lu.matrixLU();
    const double scale = std::max(1.0, jac.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < dim; ++k) {
      if (!(std::abs(packed(k, k)) > kPivotFloor * scale)) {
        const int bus = bus_of_unknown(k);
        throw SingularError("singular Jacobian at the unknown of bus " + std::to_string(bus), bus);
      }
    }
    const Eigen::VectorXd dx = lu.solve(-f);
    for (Eigen::Index k = 0; k < npv; ++k) va[pvpq[k]] += dx(k);
    for (Eigen::Index k = 0; k < npq; ++k) vm[pq[k]] += dx(npv + k);
    refresh();
    f = mismatch(s_calc);
    ++iter;
  }

  sol.iterations = iter;
  sol.v_mag = vm;
  sol.v_ang = va;
  sol.bus_ids = ybus.bus_ids;
  sol.p_inj.resize(n);
  sol.q_inj.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sol.p_inj[i] = s_calc(i).real();
    sol.q_inj[i] = s_calc(i).imag();
  }
  return sol;
}

std::vector<BranchFlow> branch_flows(const SystemCase& system, const PowerFlowSolution& sol) {
  if (sol.v_mag.size() != system.buses.size()) {
    throw ValidationError("solution does not match the case bus count");
  }
  std::vector<BranchFlow> out;
  out.reserve(system.branches.size());
  for (const auto& br : system.branches) {
    const std::size_t f = index_of(system, br.from_bus);
    const std::size_t t = index_of(system, br.to_bus);
    const Complex vf = std::polar(sol.v_mag[f], sol.v_ang[f]);
    const Complex vt = std::polar(sol.v_mag[t], sol.v_ang[t]);
    const auto s = branch_stamp(br);
    const Complex sf = vf * std::conj(s.ff * vf + s.ft * vt);
    const Complex st = vt * std::conj(s.tf * vf + s.tt * vt);
    BranchFlow flow;
    flow.from_bus = br.from_bus;
    flow.to_bus = br.to_bus;
    flow.p_send = sf.real();
    flow.q_send = sf.imag();
    flow.p_recv = st.real();
    flow.q_recv = st.imag();
    flow.loss = sf.real() + st.real();
    out.push_back(flow);
  }
  return out;
}

double shunt_losses(const SystemCase& system, const PowerFlowSolution& sol) {
  double total = 0.0;
  for (std::size_t i = 0; i < system.buses.size(); ++i) {
    total += system.buses[i].shunt_g * sol.v_mag[i] * sol.v_mag[i];
  }
  return total;
}

std::string format_solution(const SystemCase& system, const PowerFlowSolution& sol,
                            std::span<const BranchFlow> flows) {
  std::string out;
  char line[160];
  out += "# bus v_mag v_ang_deg p_inj q_inj\n";
  for (std::size_t i = 0; i < system.buses.size(); ++i) {
    std::snprintf(line, sizeof line, "%d %.6f %.6f %.6f %.6f\n", system.buses[i].id, sol.v_mag[i],
                  sol.v_ang[i] * 180.0 / std::numbers::pi, sol.p_inj[i], sol.q_inj[i]);
    out += line;
  }
  out += "# from to p_send q_send loss\n";
  for (const auto& fl : flows) {
    std::snprintf(line, sizeof line, "%d %d %.6f %.6f %.6f\n", fl.from_bus, fl.to_bus, fl.p_send, fl.q_send,
                  fl.loss);
    out += line;
  }
  return out;
}

}  // namespace gridrank
