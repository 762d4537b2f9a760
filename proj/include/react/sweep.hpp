#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "react/metrics.hpp"
#include "react/scenario.hpp"

namespace react {

struct SweepSpec {
  ScenarioConfig base;
  std::string axis;  // dotted path of a numeric config field
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  unsigned jobs = 1;
  double stabilization_time = 10.0;
};

struct SweepRow {
  double value = 0;
  std::uint64_t seed = 0;
  RunResult result;
};

struct AxisAggregate {
  double value = 0;
  std::size_t runs = 0;
  double fn_mean = 0, fn_stderr = 0;
  double fp_mean = 0, fp_stderr = 0;
  double broadcast_mean = 0, broadcast_stderr = 0;
};

// Runs the (values x seeds) cross product, up to `jobs` runs in parallel.
// Rows come back ordered by (value, seed) regardless of completion order.
// Throws std::runtime_error when the axis is unknown or a configuration
// fails validation.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

std::vector<AxisAggregate> aggregate_sweep(const std::vector<SweepRow>& rows);

std::string aggregate_csv(const std::vector<AxisAggregate>& aggregates);

}  // namespace react
