#include "gridrank/case.hpp"

#include <algorithm>
#include <charconv>
#include <complex>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gridrank/error.hpp"

namespace gridrank {

namespace {

using json = nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  return lines;
}

// Fixed-column field accessor for one card. Columns are 1-based, inclusive.
class Card {
 public:
  Card(std::string_view text, std::size_t line_no) : text_(text), line_no_(line_no) {}

  std::string_view field(std::size_t first, std::size_t last) const {
    if (first > text_.size()) return {};
    const auto len = std::min(last, text_.size()) - (first - 1);
    return trim(text_.substr(first - 1, len));
  }

  double real(std::size_t first, std::size_t last, const char* what) const {
    const auto s = field(first, last);
    if (s.empty()) return 0.0;
    double value = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) fail(first, last, what, s);
    return value;
  }

  int integer(std::size_t first, std::size_t last, const char* what, bool required) const {
    const auto s = field(first, last);
    if (s.empty()) {
      if (required) fail(first, last, what, s);
      return 0;
    }
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) fail(first, last, what, s);
    return value;
  }

  [[noreturn]] void fail(std::size_t first, std::size_t last, const char* what,
                         std::string_view got) const {
    std::ostringstream msg;
    msg << "line " << line_no_ << ", columns " << first << "-" << last << ": invalid " << what
        << " '" << got << "'";
    throw ParseError(msg.str(), line_no_, first, last);
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t line_no_;
};

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool is_terminator(std::string_view line) { return trim(line).starts_with("-999"); }

// Index of the first line after the section header, or npos.
std::size_t find_section(const std::vector<std::string_view>& lines, std::string_view header) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (starts_with(trim(lines[i]), header)) return i + 1;
  }
  return std::string_view::npos;
}

BusRecord parse_bus_card(const Card& card, double base) {
  BusRecord bus;
  bus.id = card.integer(1, 4, "bus number", true);
  if (bus.id <= 0) card.fail(1, 4, "bus number", card.field(1, 4));
  const int type = card.integer(25, 26, "bus type", true);
  switch (type) {
    case 3: bus.kind = BusKind::slack; break;
    case 2: bus.kind = BusKind::pv; break;
    case 0:
    case 1: bus.kind = BusKind::pq; break;
    default: card.fail(25, 26, "bus type", card.field(25, 26));
  }
  bus.v_mag = card.real(28, 33, "final voltage");
  bus.v_ang_deg = card.real(34, 40, "final angle");
  bus.p_load = card.real(41, 49, "load MW") / base;
  bus.q_load = card.real(50, 58, "load MVAr") / base;
  bus.p_gen = card.real(59, 67, "generation MW") / base;
  bus.q_gen = card.real(68, 75, "generation MVAr") / base;
  const double desired = card.real(85, 90, "desired volts");
  if (bus.kind != BusKind::pq && desired > 0.0) bus.v_mag = desired;
  bus.shunt_g = card.real(107, 114, "shunt G");
  bus.shunt_b = card.real(115, 122, "shunt B");
  return bus;
}

BranchRecord parse_branch_card(const Card& card) {
  BranchRecord br;
  br.from_bus = card.integer(1, 4, "tap bus number", true);
  br.to_bus = card.integer(6, 9, "Z bus number", true);
  const int circuit = card.integer(17, 17, "circuit", false);
  br.circuit_id = circuit == 0 ? 1 : circuit;
  br.r = card.real(20, 29, "branch resistance");
  br.x = card.real(30, 40, "branch reactance");
  br.b_charging = card.real(41, 50, "line charging");
  const double ratio = card.real(77, 82, "turns ratio");
  br.tap_ratio = ratio == 0.0 ? 1.0 : ratio;
  return br;
}

// --- native format -------------------------------------------------------

template <class T>
T get_field(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing required field");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw SchemaError(path + "." + key, "wrong type");
  }
}

template <class T>
T get_optional(const json& obj, const std::string& key, const std::string& path, T fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw SchemaError(path + "." + key, "wrong type");
  }
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) throw SchemaError(path + "." + key, "unknown field");
  }
}

const std::set<std::string> kBusKeys = {"id",     "kind",   "v_mag",  "v_ang_deg", "p_gen",
                                        "q_gen",  "p_load", "q_load", "shunt_g",   "shunt_b"};
const std::set<std::string> kBranchKeys = {"from_bus",   "to_bus",    "r",         "x",
                                           "b_charging", "tap_ratio", "circuit_id"};
const std::set<std::string> kCaseKeys = {"name", "base_mva", "buses", "branches"};

}  // namespace

std::string_view to_string(BusKind kind) {
  switch (kind) {
    case BusKind::slack: return "slack";
    case BusKind::pv: return "pv";
    case BusKind::pq: return "pq";
  }
  return "pq";
}

std::optional<BusKind> bus_kind_from_string(std::string_view text) {
  if (text == "slack") return BusKind::slack;
  if (text == "pv") return BusKind::pv;
  if (text == "pq") return BusKind::pq;
  return std::nullopt;
}

std::optional<std::size_t> SystemCase::bus_index(int id) const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t SystemCase::slack_index() const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].kind == BusKind::slack) return i;
  }
  throw ValidationError("case '" + name + "' has no slack bus");
}

void validate(const SystemCase& system) {
  if (!(system.base_mva > 0.0)) throw ValidationError("base_mva must be positive");
  if (system.buses.empty()) throw ValidationError("case has no buses");
  std::set<int> ids;
  int slack_count = 0;
  for (const auto& bus : system.buses) {
    if (bus.id <= 0) throw ValidationError("bus id " + std::to_string(bus.id) + " is not positive");
    if (!ids.insert(bus.id).second) {
      throw ValidationError("duplicate bus id " + std::to_string(bus.id));
    }
    if (bus.kind == BusKind::slack) ++slack_count;
    if (bus.kind != BusKind::pq && !(bus.v_mag > 0.0)) {
      throw ValidationError("bus " + std::to_string(bus.id) + " needs a positive voltage setpoint");
    }
  }
  if (slack_count != 1) {
    throw ValidationError("expected exactly one slack bus, found " + std::to_string(slack_count));
  }
  for (std::size_t k = 0; k < system.branches.size(); ++k) {
    const auto& br = system.branches[k];
    const auto label = "branch " + std::to_string(br.from_bus) + "-" + std::to_string(br.to_bus);
    if (!ids.contains(br.from_bus) || !ids.contains(br.to_bus)) {
      throw ValidationError(label + " references an unknown bus");
    }
    if (br.from_bus == br.to_bus) throw ValidationError(label + " is a self loop");
    if (br.r == 0.0 && br.x == 0.0) throw ValidationError(label + " has zero series impedance");
    if (!(br.tap_ratio > 0.0)) throw ValidationError(label + " has a non-positive tap ratio");
  }
}

SystemCase parse_cdf(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw TruncationError("empty CDF input");

  SystemCase system;
  const Card title(lines[0], 1);
  system.base_mva = title.real(32, 37, "MVA base");
  if (!(system.base_mva > 0.0)) title.fail(32, 37, "MVA base", title.field(32, 37));
  system.name = std::string(title.field(46, 73));

  const auto bus_start = find_section(lines, "BUS DATA FOLLOWS");
  if (bus_start == std::string_view::npos) throw TruncationError("missing BUS DATA section");
  std::size_t i = bus_start;
  for (; i < lines.size() && !is_terminator(lines[i]); ++i) {
    if (trim(lines[i]).empty()) continue;
    system.buses.push_back(parse_bus_card(Card(lines[i], i + 1), system.base_mva));
  }
  if (i >= lines.size()) {
    throw TruncationError("BUS DATA section not terminated by -999", lines.size(), 1, 4);
  }

  const auto branch_start = find_section(lines, "BRANCH DATA FOLLOWS");
  if (branch_start == std::string_view::npos) throw TruncationError("missing BRANCH DATA section");
  for (i = branch_start; i < lines.size() && !is_terminator(lines[i]); ++i) {
    if (trim(lines[i]).empty()) continue;
    system.branches.push_back(parse_branch_card(Card(lines[i], i + 1)));
  }
  if (i >= lines.size()) {
    throw TruncationError("BRANCH DATA section not terminated by -999", lines.size(), 1, 4);
  }

  validate(system);
  return system;
}

SystemCase parse_case_native(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("native case is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("$", "top level must be an object");
  reject_unknown(doc, kCaseKeys, "$");

  SystemCase system;
  system.name = get_optional<std::string>(doc, "name", "$", "");
  system.base_mva = get_field<double>(doc, "base_mva", "$");

  const auto buses = doc.find("buses");
  if (buses == doc.end() || !buses->is_array()) throw SchemaError("$.buses", "missing array");
  for (std::size_t k = 0; k < buses->size(); ++k) {
    const auto path = "$.buses[" + std::to_string(k) + "]";
    const auto& obj = (*buses)[k];
    if (!obj.is_object()) throw SchemaError(path, "must be an object");
    reject_unknown(obj, kBusKeys, path);
    BusRecord bus;
    bus.id = get_field<int>(obj, "id", path);
    const auto kind = get_field<std::string>(obj, "kind", path);
    const auto parsed = bus_kind_from_string(kind);
    if (!parsed) throw SchemaError(path + ".kind", "expected slack, pv or pq");
    bus.kind = *parsed;
    bus.v_mag = get_field<double>(obj, "v_mag", path);
    bus.v_ang_deg = get_optional(obj, "v_ang_deg", path, 0.0);
    bus.p_gen = get_optional(obj, "p_gen", path, 0.0);
    bus.q_gen = get_optional(obj, "q_gen", path, 0.0);
    bus.p_load = get_optional(obj, "p_load", path, 0.0);
    bus.q_load = get_optional(obj, "q_load", path, 0.0);
    bus.shunt_g = get_optional(obj, "shunt_g", path, 0.0);
    bus.shunt_b = get_optional(obj, "shunt_b", path, 0.0);
    system.buses.push_back(bus);
  }

  const auto branches = doc.find("branches");
  if (branches == doc.end() || !branches->is_array()) {
    throw SchemaError("$.branches", "missing array");
  }
  for (std::size_t k = 0; k < branches->size(); ++k) {
    const auto path = "$.branches[" + std::to_string(k) + "]";
    const auto& obj = (*branches)[k];
    if (!obj.is_object()) throw SchemaError(path, "must be an object");
    reject_unknown(obj, kBranchKeys, path);
    BranchRecord br;
    br.from_bus = get_field<int>(obj, "from_bus", path);
    br.to_bus = get_field<int>(obj, "to_bus", path);
    br.r = get_field<double>(obj, "r", path);
    br.x = get_field<double>(obj, "x", path);
    br.b_charging = get_optional(obj, "b_charging", path, 0.0);
    br.tap_ratio = get_optional(obj, "tap_ratio", path, 1.0);
    br.circuit_id = get_optional(obj, "circuit_id", path, 1);
    system.branches.push_back(br);
  }

  validate(system);
  return system;
}

std::string emit_case_native(const SystemCase& system) {
  json doc;
  doc["name"] = system.name;
  doc["base_mva"] = system.base_mva;
  doc["buses"] = json::array();
  for (const auto& bus : system.buses) {
    doc["buses"].push_back({{"id", bus.id},
                            {"kind", std::string(to_string(bus.kind))},
                            {"v_mag", bus.v_mag},
                            {"v_ang_deg", bus.v_ang_deg},
                            {"p_gen", bus.p_gen},
                            {"q_gen", bus.q_gen},
                            {"p_load", bus.p_load},
                            {"q_load", bus.q_load},
                            {"shunt_g", bus.shunt_g},
                            {"shunt_b", bus.shunt_b}});
  }
  doc["branches"] = json::array();
  for (const auto& br : system.branches) {
    doc["branches"].push_back({{"from_bus", br.from_bus},
                               {"to_bus", br.to_bus},
                               {"r", br.r},
                               {"x", br.x},
                               {"b_charging", br.b_charging},
                               {"tap_ratio", br.tap_ratio},
                               {"circuit_id", br.circuit_id}});
  }
  return doc.dump(2) + "\n";
}

SystemCase merge_parallel_branches(const SystemCase& system) {
  using Complex = std::complex<double>;
  struct Group {
    std::size_t first;
    Complex admittance;
    double charging = 0.0;
    double tap_weighted = 0.0;
    double weight = 0.0;
    int count = 0;
  };
  std::map<std::pair<int, int>, Group> groups;
  std::vector<std::pair<int, int>> order;
  for (std::size_t k = 0; k < system.branches.size(); ++k) {
    const auto& br = system.branches[k];
    const std::pair key{std::min(br.from_bus, br.to_bus), std::max(br.from_bus, br.to_bus)};
    auto [it, inserted] = groups.try_emplace(key, Group{k, {}, 0.0, 0.0, 0.0, 0});
    if (inserted) order.push_back(key);
    auto& g = it->second;
    const Complex y = 1.0 / Complex(br.r, br.x);
    // Tap ratios are expressed relative to the group's first orientation.
    const bool same_side = br.from_bus == system.branches[g.first].from_bus;
    const double tap = same_side ? br.tap_ratio : 1.0 / br.tap_ratio;
    g.admittance += y;
    g.charging += br.b_charging;
    g.tap_weighted += std::abs(y) * tap;
    g.weight += std::abs(y);
    ++g.count;
  }

  SystemCase merged = system;
  merged.branches.clear();
  for (const auto& key : order) {
    const auto& g = groups.at(key);
    BranchRecord br = system.branches[g.first];
    if (g.count > 1) {
      const Complex z = 1.0 / g.admittance;
      br.r = z.real();
      br.x = z.imag();
      br.b_charging = g.charging;
      // Equal taps (the usual case) come through unchanged.
      br.tap_ratio = g.tap_weighted / g.weight;
      br.circuit_id = 1;
    }
    merged.branches.push_back(br);
  }
  return merged;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SystemCase load_case_file(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  if (path.extension() == ".json") return parse_case_native(text);
  return parse_cdf(text);
}

}  // namespace gridrank
