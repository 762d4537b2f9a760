#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "react/forwarding.hpp"

namespace react {

struct Ipv4Prefix {
  std::uint32_t addr = 0;
  unsigned len = 16;

  friend bool operator==(const Ipv4Prefix&, const Ipv4Prefix&) = default;
};

std::string to_string(const Ipv4Prefix& prefix);
bool parse_prefix(const std::string& text, Ipv4Prefix& prefix);

struct FilterConfig {
  std::string engine = "react";  // react | cbf
  unsigned b = 4;
  unsigned k = 2;
  std::uint64_t per_window_bits = 1 << 17;
  double tau = 4.0;
  bool two_filter_mode = false;
  std::string include_write_window_policy = "auto";  // auto | include | exclude
};

struct TrafficConfig {
  double r = 1000.0;  // legitimate requests per second
  double a = 0.0;     // forged responses per second
  std::vector<Ipv4Prefix> client_prefixes = {
      {0x0a000000, 16}, {0x0a010000, 16}, {0x0a020000, 16}, {0x0a030000, 16}};
  std::string txn_id_policy = "fixed";  // fixed | fresh
  double timeout = 5.0;
  unsigned max_retries = 3;
  std::string attack_ingress = "any";  // any | switch index
};

struct DelayConfig {
  double client_switch = 0.005;
  double switch_server = 0.1;
  double inter_switch = 0.01;
  double server_service = 0.0;
};

struct TopologyConfig {
  unsigned num_switches = 2;
  double symmetric_fraction = 1.0;
  DelayConfig delays;
  double jitter = 0.01;
  double route_flip_time = 0.0;  // 0 disables the mid-run routing re-draw
};

struct ProtocolOptions {
  unsigned prefix_len = 16;
  std::size_t forwarded_requests_capacity = 2048;
  double forwarded_requests_ttl = 1.0;
  bool ntp_mode = false;
  bool peacetime_mode = false;
  double unmatched_threshold = 0.1;
};

struct OutputConfig {
  std::string csv_dir = "out";
  bool trace = false;
};

struct ScenarioConfig {
  double duration = 30.0;
  FilterConfig filter;
  TrafficConfig traffic;
  TopologyConfig topology;
  ProtocolOptions protocol;
  OutputConfig outputs;
};

// One settable/printable config field, addressed by its dotted path.
struct ConfigField {
  enum class Kind { number, boolean, text };
  std::string path;
  Kind kind;
  std::string (*get)(const ScenarioConfig&);
  bool (*set)(ScenarioConfig&, const std::string&);
};

const std::vector<ConfigField>& config_fields();

// Sets a field from its textual value. Throws std::runtime_error naming the
// offending key or value.
void set_config_field(ScenarioConfig& config, const std::string& path, const std::string& value);

// Numeric fields usable as sweep axes.
std::vector<std::string> numeric_config_paths();

// Flattened (path, value) pairs in registry order.
std::vector<std::pair<std::string, std::string>> flatten_config(const ScenarioConfig& config);

// Parses the flat key=value scenario format ('#' comments, blank lines
// allowed). Throws std::runtime_error with a line-numbered message.
ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);

std::string serialize_scenario(const ScenarioConfig& config);

struct Violation {
  enum class Severity { error, warning } severity;
  std::string message;
};

// Checks the run assumptions: every flow crosses a switch, inter-switch
// latency below the server path, window span vs client timeout, sizes and
// rates in range. Errors block a run; warnings do not.
std::vector<Violation> validate_config(const ScenarioConfig& config);

inline bool has_errors(const std::vector<Violation>& violations) {
  for (const auto& violation : violations) {
    if (violation.severity == Violation::Severity::error) return true;
  }
  return false;
}

}  // namespace react
