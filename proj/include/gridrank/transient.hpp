#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gridrank/case.hpp"
#include "gridrank/powerflow.hpp"

namespace gridrank {

/// Classical machine data. h, xd_prime and damping are on the machine's own
/// MVA base; h = +inf models an infinite bus.
struct MachineParams {
  int bus = 0;
  double h = 5.0;
  double xd_prime = 0.2;
  double damping = 0.0;
  double f0 = 50.0;
  double mva_base = 100.0;

  bool operator==(const MachineParams&) const = default;
};

/// H = 5 s, x'd = 0.2 pu, D = 0, 50 Hz at every source bus, each machine
/// rated at its own solved real output (at least 1 MVA).
std::vector<MachineParams> default_machines(const SystemCase& system, const PowerFlowSolution& solution);

/// Machine file: JSON object keyed by bus id, each value holding h, xd_prime,
/// damping, f0 and optionally mva_base (defaults to the case base).
std::vector<MachineParams> parse_machine_file(std::string_view text, double default_mva_base);
std::string emit_machine_file(const std::vector<MachineParams>& machines);
std::vector<MachineParams> load_machine_file(const std::filesystem::path& path, double default_mva_base);

enum class FaultEnd { from, to };

/// Bolted fault at one bus from t = 0, cleared by removing one branch.
struct Disturbance {
  int fault_bus = 0;
  std::size_t removed_branch = 0;
};

enum class NetworkState { pre_fault, fault_on, post_clearing };

struct ReducedNetwork {
  std::vector<int> machine_bus;
  std::vector<double> e_mag;
  std::vector<double> delta0;
  std::vector<double> p_m;
  // Dynamics on the system base.
  std::vector<double> h;
  std::vector<double> damping;
  std::vector<double> f0;
  std::size_t slack_machine = 0;
  Eigen::MatrixXcd y_pre;
  Eigen::MatrixXcd y_fault;
  Eigen::MatrixXcd y_post;
  std::vector<int> islanded;  // machine buses cut off from the slack machine after clearing

  std::size_t size() const { return machine_bus.size(); }
  const Eigen::MatrixXcd& matrix(NetworkState state) const;
};

/// Builds the internal-node reduced matrices. Without a disturbance all three
/// states equal the pre-fault network.
ReducedNetwork init_classical(const SystemCase& system, const PowerFlowSolution& solution,
                              const std::vector<MachineParams>& machines,
                              const std::optional<Disturbance>& disturbance = std::nullopt);

/// Generator behind reactance x against an infinite bus of voltage v_inf.
ReducedNetwork init_smib(double p_m, double e, double v_inf, double x, double h, double f0, double damping = 0.0);

/// Electrical power of every machine at angles `delta`.
Eigen::VectorXd electrical_power(const ReducedNetwork& net, NetworkState state, const Eigen::VectorXd& delta);

/// State layout: [delta_0..delta_{m-1}, dw_0..dw_{m-1}].
Eigen::VectorXd swing_rhs(const Eigen::VectorXd& state, const ReducedNetwork& net, NetworkState state_kind);

enum class Verdict { stable, unstable };
std::string_view to_string(Verdict verdict);

struct SimOptions {
  double t_clear = 1.0;
  double t_end = 10.0;
  double dt = 1e-3;
  double threshold = std::numbers::pi;
};

struct SwingTrajectory {
  std::vector<double> times;
  std::vector<int> machine_bus;
  std::vector<std::vector<double>> delta;  // [machine][sample]
  std::vector<std::vector<double>> omega;  // speed deviation, rad/s
  std::size_t slack_machine = 0;
  double t_clear = 0.0;
  std::vector<int> islanded;
  Verdict verdict = Verdict::stable;
  std::optional<double> first_divergence_time;
  double max_excursion = 0.0;  // after clearing, radians

  /// delta_i - delta_slack at sample k.
  double relative_angle(std::size_t machine, std::size_t k) const;
};

/// Fixed-step RK4 on the fault-on network until step round(t_clear / dt),
/// then on the post-clearing network.
SwingTrajectory simulate(const ReducedNetwork& net, const SimOptions& options = {});

/// Unstable when a relative-angle excursion after clearing exceeds the
/// threshold, or when a machine was islanded. Fills first_divergence_time.
Verdict verdict(SwingTrajectory& trajectory, double threshold = std::numbers::pi);

/// Locates the branch joining a and b (either orientation).
std::optional<std::size_t> find_branch(const SystemCase& system, int a, int b);

/// `system` is the merged case the solution belongs to.
SwingTrajectory simulate_fault(const SystemCase& system, const PowerFlowSolution& solution,
                               const std::vector<MachineParams>& machines, std::size_t branch, FaultEnd end,
                               const SimOptions& options = {});

/// CSV with t, delta_<bus>..., dw_<bus>..., rel_<bus>... columns.
std::string trajectory_csv(const SwingTrajectory& trajectory, std::size_t stride = 1);

}  // namespace gridrank
