#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridrank/case.hpp"

namespace gridrank {

using Complex = std::complex<double>;

/// Dense bus admittance matrix, rows ordered as SystemCase::buses.
struct AdmittanceMatrix {
  std::vector<int> bus_ids;
  Eigen::MatrixXcd y;

  std::size_t size() const { return bus_ids.size(); }
};

/// Pi-model series/shunt stamps of one branch (tap on the from side).
struct BranchStamp {
  Complex ff, ft, tf, tt;
};

BranchStamp branch_stamp(const BranchRecord& branch);

/// Throws SingularError for a branch with zero series impedance.
AdmittanceMatrix build_ybus(const SystemCase& system);

struct PowerFlowOptions {
  double tol = 1e-8;
  int max_iter = 50;
};

struct PowerFlowSolution {
  std::vector<int> bus_ids;
  std::vector<double> v_mag;
  std::vector<double> v_ang;  // radians
  std::vector<double> p_inj;
  std::vector<double> q_inj;
  int iterations = 0;
  double max_mismatch = 0.0;
  bool converged = false;
  std::vector<double> mismatch_history;
};

/// Full Newton-Raphson in polar form from a flat start.
/// PV buses hold their voltage setpoint; reactive limits are not enforced.
PowerFlowSolution solve_power_flow(const SystemCase& system, const PowerFlowOptions& options = {});

/// Per-branch complex power. p_send/q_send enter the branch at from_bus and
/// p_recv/q_recv enter it at to_bus, so loss = p_send + p_recv.
struct BranchFlow {
  int from_bus = 0;
  int to_bus = 0;
  double p_send = 0.0;
  double q_send = 0.0;
  double p_recv = 0.0;
  double q_recv = 0.0;
  double loss = 0.0;
};

std::vector<BranchFlow> branch_flows(const SystemCase& system, const PowerFlowSolution& solution);

/// Real power absorbed by bus shunt conductances at the solved voltages.
double shunt_losses(const SystemCase& system, const PowerFlowSolution& solution);

/// Tabular text dump: one row per bus, then one row per branch.
std::string format_solution(const SystemCase& system, const PowerFlowSolution& solution,
                            std::span<const BranchFlow> flows);

}  // namespace gridrank
