#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gridrank {

enum class BusKind { slack, pv, pq };

std::string_view to_string(BusKind kind);
std::optional<BusKind> bus_kind_from_string(std::string_view text);

/// One bus. Powers and shunts are per-unit on the case base.
struct BusRecord {
  int id = 0;
  BusKind kind = BusKind::pq;
  double v_mag = 1.0;
  double v_ang_deg = 0.0;
  double p_gen = 0.0;
  double q_gen = 0.0;
  double p_load = 0.0;
  double q_load = 0.0;
  double shunt_g = 0.0;
  double shunt_b = 0.0;

  bool operator==(const BusRecord&) const = default;
};

/// A line or transformer. The off-nominal tap sits on the from-bus side.
struct BranchRecord {
  int from_bus = 0;
  int to_bus = 0;
  double r = 0.0;
  double x = 0.0;
  double b_charging = 0.0;
  double tap_ratio = 1.0;
  int circuit_id = 1;

  bool operator==(const BranchRecord&) const = default;
};

struct SystemCase {
  std::string name;
  double base_mva = 100.0;
  std::vector<BusRecord> buses;
  std::vector<BranchRecord> branches;

  bool operator==(const SystemCase&) const = default;

  std::optional<std::size_t> bus_index(int id) const;
  std::size_t slack_index() const;
};

/// Throws ValidationError on the first violated invariant.
void validate(const SystemCase& system);

/// IEEE Common Data Format. Column map: docs/cdf_format.md.
SystemCase parse_cdf(std::string_view text);

/// Native JSON case document (see README).
SystemCase parse_case_native(std::string_view text);
std::string emit_case_native(const SystemCase& system);

/// Replaces every group of parallel circuits by one equivalent branch.
SystemCase merge_parallel_branches(const SystemCase& system);

/// Reads a case by extension: .json is native, anything else is CDF.
SystemCase load_case_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace gridrank
