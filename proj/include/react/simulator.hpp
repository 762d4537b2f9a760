#pragma once

#include <cstdint>
#include <iosfwd>

#include "react/metrics.hpp"
#include "react/scenario.hpp"

namespace react {

struct RunOptions {
  std::ostream* trace = nullptr;  // tab-separated line per switch-handled packet
};

// Executes the scenario's event loop from t = 0 to config.duration and
// returns the per-second series plus summary counters. A given
// (config, seed) pair always produces the identical RunResult. The config
// must already have passed validate_config.
RunResult run_scenario(const ScenarioConfig& config, std::uint64_t seed,
                       const RunOptions& options = {});

}  // namespace react
