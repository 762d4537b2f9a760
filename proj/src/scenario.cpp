#include "react/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace react {

namespace {

std::string trim(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

std::string format_number(double value) {
  if (value == static_cast<double>(static_cast<long long>(value)) && std::fabs(value) < 1e15) {
    return std::to_string(static_cast<long long>(value));
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

bool parse_number(const std::string& text, double& out) {
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end != text.c_str() && *end == '\0';
}

bool parse_bool(const std::string& text, bool& out) {
  if (text == "true" || text == "1" || text == "yes") {
    out = true;
    return true;
  }
  if (text == "false" || text == "0" || text == "no") {
    out = false;
    return true;
  }
  return false;
}

template <typename T>
bool set_numeric(T& field, const std::string& text) {
  double value;
  if (!parse_number(text, value)) return false;
  field = static_cast<T>(value);
  return true;
}

std::string prefixes_to_string(const std::vector<Ipv4Prefix>& prefixes) {
  std::string out;
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    if (i > 0) out += ',';
    out += to_string(prefixes[i]);
  }
  return out;
}

bool set_prefixes(std::vector<Ipv4Prefix>& field, const std::string& text) {
  std::vector<Ipv4Prefix> parsed;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    Ipv4Prefix prefix;
    if (!parse_prefix(trim(item), prefix)) return false;
    parsed.push_back(prefix);
  }
  if (parsed.empty()) return false;
  field = std::move(parsed);
  return true;
}

#define NUMBER_FIELD(path, expr)                                                              \
  ConfigField {                                                                               \
    path, ConfigField::Kind::number,                                                          \
        [](const ScenarioConfig& c) { return format_number(static_cast<double>(c.expr)); },   \
        [](ScenarioConfig& c, const std::string& v) { return set_numeric(c.expr, v); }        \
  }

#define BOOL_FIELD(path, expr)                                                                \
  ConfigField {                                                                               \
    path, ConfigField::Kind::boolean,                                                         \
        [](const ScenarioConfig& c) { return std::string(c.expr ? "true" : "false"); },       \
        [](ScenarioConfig& c, const std::string& v) { return parse_bool(v, c.expr); }         \
  }

#define TEXT_FIELD(path, expr)                                                                \
  ConfigField {                                                                               \
    path, ConfigField::Kind::text, [](const ScenarioConfig& c) { return c.expr; },            \
        [](ScenarioConfig& c, const std::string& v) {                                         \
          c.expr = v;                                                                         \
          return true;                                                                        \
        }                                                                                     \
  }

}  // namespace

std::string to_string(const Ipv4Prefix& prefix) {
  return format_ipv4(prefix.addr) + "/" + std::to_string(prefix.len);
}

bool parse_prefix(const std::string& text, Ipv4Prefix& prefix) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return false;
  std::uint32_t addr;
  if (!parse_ipv4(text.substr(0, slash), addr)) return false;
  char* end = nullptr;
  const std::string len_text = text.substr(slash + 1);
  const long len = std::strtol(len_text.c_str(), &end, 10);
  if (end == len_text.c_str() || *end != '\0' || len < 0 || len > 32) return false;
  prefix.addr = mask_address(addr, static_cast<unsigned>(len));
  prefix.len = static_cast<unsigned>(len);
  return true;
}

const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = {
      NUMBER_FIELD("duration", duration),
      TEXT_FIELD("filter.engine", filter.engine),
      NUMBER_FIELD("filter.b", filter.b),
      NUMBER_FIELD("filter.k", filter.k),
      NUMBER_FIELD("filter.per_window_bits", filter.per_window_bits),
      NUMBER_FIELD("filter.tau", filter.tau),
      BOOL_FIELD("filter.two_filter_mode", filter.two_filter_mode),
      TEXT_FIELD("filter.include_write_window_policy", filter.include_write_window_policy),
      NUMBER_FIELD("traffic.r", traffic.r),
      NUMBER_FIELD("traffic.a", traffic.a),
      ConfigField{"traffic.client_prefixes", ConfigField::Kind::text,
                  [](const ScenarioConfig& c) { return prefixes_to_string(c.traffic.client_prefixes); },
                  [](ScenarioConfig& c, const std::string& v) {
                    return set_prefixes(c.traffic.client_prefixes, v);
                  }},
      TEXT_FIELD("traffic.txn_id_policy", traffic.txn_id_policy),
      NUMBER_FIELD("traffic.timeout", traffic.timeout),
      NUMBER_FIELD("traffic.max_retries", traffic.max_retries),
      TEXT_FIELD("traffic.attack_ingress", traffic.attack_ingress),
      NUMBER_FIELD("topology.num_switches", topology.num_switches),
      NUMBER_FIELD("topology.symmetric_fraction", topology.symmetric_fraction),
      NUMBER_FIELD("topology.delays.client_switch", topology.delays.client_switch),
      NUMBER_FIELD("topology.delays.switch_server", topology.delays.switch_server),
      NUMBER_FIELD("topology.delays.inter_switch", topology.delays.inter_switch),
      NUMBER_FIELD("topology.delays.server_service", topology.delays.server_service),
      NUMBER_FIELD("topology.jitter", topology.jitter),
      NUMBER_FIELD("topology.route_flip_time", topology.route_flip_time),
      NUMBER_FIELD("protocol.prefix_len", protocol.prefix_len),
      NUMBER_FIELD("protocol.forwarded_requests.capacity", protocol.forwarded_requests_capacity),
      NUMBER_FIELD("protocol.forwarded_requests.ttl", protocol.forwarded_requests_ttl),
      BOOL_FIELD("protocol.ntp_mode", protocol.ntp_mode),
      BOOL_FIELD("protocol.peacetime_mode", protocol.peacetime_mode),
      NUMBER_FIELD("protocol.unmatched_threshold", protocol.unmatched_threshold),
      TEXT_FIELD("outputs.csv_dir", outputs.csv_dir),
      BOOL_FIELD("outputs.trace", outputs.trace),
  };
  return fields;
}

void set_config_field(ScenarioConfig& config, const std::string& path, const std::string& value) {
  for (const auto& field : config_fields()) {
    if (field.path == path) {
      if (!field.set(config, value)) {
        throw std::runtime_error("invalid value '" + value + "' for config key '" + path + "'");
      }
      return;
    }
  }
  throw std::runtime_error("unknown config key '" + path + "'");
}

std::vector<std::string> numeric_config_paths() {
  std::vector<std::string> out;
  for (const auto& field : config_fields()) {
    if (field.kind == ConfigField::Kind::number) out.push_back(field.path);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> flatten_config(const ScenarioConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(config_fields().size());
  for (const auto& field : config_fields()) out.emplace_back(field.path, field.get(config));
  return out;
}

ScenarioConfig parse_scenario_text(const std::string& text) {
  ScenarioConfig config;
  std::stringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("scenario line " + std::to_string(line_number) +
                               ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set_config_field(config, key, value);
    } catch (const std::runtime_error& err) {
      throw std::runtime_error("scenario line " + std::to_string(line_number) + ": " + err.what());
    }
  }
  return config;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open scenario file '" + path + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_scenario_text(buffer.str());
}

std::string serialize_scenario(const ScenarioConfig& config) {
  std::string out;
  for (const auto& [path, value] : flatten_config(config)) {
    out += path;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

std::vector<Violation> validate_config(const ScenarioConfig& config) {
  std::vector<Violation> out;
  const auto error = [&out](std::string message) {
    out.push_back({Violation::Severity::error, std::move(message)});
  };
  const auto warning = [&out](std::string message) {
    out.push_back({Violation::Severity::warning, std::move(message)});
  };

  if (config.duration <= 0) error("duration must be positive");

  const auto& filter = config.filter;
  if (filter.engine != "react" && filter.engine != "cbf") {
    error("filter.engine must be 'react' or 'cbf'");
  }
  if (filter.b < 2) error("filter.b must be at least 2");
  if (filter.two_filter_mode && filter.b != 2) {
    error("filter.two_filter_mode requires filter.b = 2");
  }
  if (!filter.two_filter_mode && filter.b == 2) {
    error("filter.b = 2 requires filter.two_filter_mode = true");
  }
  if (filter.k < 1) error("filter.k must be at least 1");
  if (filter.per_window_bits < 64 || (filter.per_window_bits & (filter.per_window_bits - 1)) != 0) {
    error("filter.per_window_bits must be a power of two >= 64");
  }
  if (filter.tau <= 0) error("filter.tau must be positive");
  if (filter.include_write_window_policy != "auto" &&
      filter.include_write_window_policy != "include" &&
      filter.include_write_window_policy != "exclude") {
    error("filter.include_write_window_policy must be auto, include, or exclude");
  }

  const auto& traffic = config.traffic;
  if (traffic.r <= 0) error("traffic.r must be positive");
  if (traffic.a < 0) error("traffic.a must be non-negative");
  if (traffic.client_prefixes.empty()) error("traffic.client_prefixes must not be empty");
  if (traffic.txn_id_policy != "fixed" && traffic.txn_id_policy != "fresh") {
    error("traffic.txn_id_policy must be 'fixed' or 'fresh'");
  }
  if (traffic.timeout <= 0) error("traffic.timeout must be positive");
  if (traffic.attack_ingress != "any") {
    double index;
    if (!parse_number(traffic.attack_ingress, index) || index < 0 ||
        index >= config.topology.num_switches || index != std::floor(index)) {
      error("traffic.attack_ingress must be 'any' or a switch index below topology.num_switches");
    }
  }

  const auto& topology = config.topology;
  if (topology.num_switches < 1) {
    error("topology.num_switches must be at least 1: every path must traverse a switch");
  }
  if (topology.symmetric_fraction < 0 || topology.symmetric_fraction > 1) {
    error("topology.symmetric_fraction must lie in [0, 1]");
  }
  if (topology.symmetric_fraction < 1 && topology.num_switches < 2) {
    error("asymmetric responses need a downstream switch: set topology.num_switches >= 2");
  }
  if (topology.delays.client_switch <= 0) error("topology.delays.client_switch must be positive");
  if (topology.delays.switch_server <= 0) error("topology.delays.switch_server must be positive");
  if (topology.num_switches > 1) {
    if (topology.delays.inter_switch <= 0) error("topology.delays.inter_switch must be positive");
    if (topology.delays.inter_switch >= topology.delays.switch_server) {
      error("topology.delays.inter_switch must be smaller than topology.delays.switch_server");
    }
  }
  if (topology.delays.server_service < 0) error("topology.delays.server_service must be non-negative");
  if (topology.jitter < 0) error("topology.jitter must be non-negative");
  if (topology.route_flip_time < 0) error("topology.route_flip_time must be non-negative");
  if (topology.route_flip_time >= config.duration && topology.route_flip_time > 0) {
    warning("topology.route_flip_time is at or past the end of the run and will have no effect");
  }

  const auto& protocol = config.protocol;
  if (protocol.prefix_len > 32) error("protocol.prefix_len must lie in [0, 32]");
  if (protocol.forwarded_requests_capacity < 1) {
    error("protocol.forwarded_requests.capacity must be at least 1");
  }
  if (protocol.forwarded_requests_ttl <= 0) error("protocol.forwarded_requests.ttl must be positive");
  if (protocol.unmatched_threshold < 0 || protocol.unmatched_threshold > 1) {
    error("protocol.unmatched_threshold must lie in [0, 1]");
  }

  if (filter.engine == "cbf") {
    if (protocol.ntp_mode) error("filter.engine = cbf does not support protocol.ntp_mode");
    if (protocol.peacetime_mode) error("filter.engine = cbf does not support protocol.peacetime_mode");
    if (topology.num_switches != 1 || topology.symmetric_fraction != 1.0) {
      error("filter.engine = cbf runs single-switch symmetric only");
    }
  }

  if (filter.engine == "react" && topology.symmetric_fraction < 1.0) {
    const double check_window = filter.tau * (filter.b >= 2 ? filter.b - 2 : 0);
    if (check_window <= traffic.timeout) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "check window tau*(b-2) = %g does not exceed the client timeout %g; "
                    "retransmissions of asymmetric requests may not be recognized",
                    check_window, traffic.timeout);
      warning(buf);
    }
  }

  return out;
}

}  // namespace react
