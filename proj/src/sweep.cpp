#include "react/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "react/simulator.hpp"

namespace react {

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  const auto numeric = numeric_config_paths();
  if (std::find(numeric.begin(), numeric.end(), spec.axis) == numeric.end()) {
    std::string message = "unknown sweep axis '" + spec.axis + "'; numeric axes:";
    for (const auto& path : numeric) message += "\n  " + path;
    throw std::runtime_error(message);
  }
  if (spec.values.empty() || spec.seeds.empty()) {
    throw std::runtime_error("sweep needs at least one value and one seed");
  }

  struct Task {
    double value;
    std::uint64_t seed;
    ScenarioConfig config;
  };
  std::vector<Task> tasks;
  for (double value : spec.values) {
    for (std::uint64_t seed : spec.seeds) {
      ScenarioConfig config = spec.base;
      char text[32];
      std::snprintf(text, sizeof(text), "%.17g", value);
      set_config_field(config, spec.axis, text);
      const auto violations = validate_config(config);
      if (has_errors(violations)) {
        std::string message = "sweep value " + std::string(text) + " fails validation:";
        for (const auto& violation : violations) {
          if (violation.severity == Violation::Severity::error) message += "\n  " + violation.message;
        }
        throw std::runtime_error(message);
      }
      tasks.push_back({value, seed, std::move(config)});
    }
  }

  std::vector<SweepRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  const unsigned jobs = std::max(1u, spec.jobs);
  const auto worker = [&] {
    while (true) {
      const std::size_t index = next.fetch_add(1);
      if (index >= tasks.size() || failed.load()) break;
      try {
        rows[index].value = tasks[index].value;
        rows[index].seed = tasks[index].seed;
        rows[index].result = run_scenario(tasks[index].config, tasks[index].seed);
      } catch (const std::exception& err) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        if (failure.empty()) failure = err.what();
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned i = 0; i < jobs; ++i) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();
  }
  if (failed.load()) throw std::runtime_error("sweep run failed: " + failure);
  return rows;
}

std::vector<AxisAggregate> aggregate_sweep(const std::vector<SweepRow>& rows) {
  std::vector<AxisAggregate> out;
  std::size_t i = 0;
  while (i < rows.size()) {
    const double value = rows[i].value;
    std::vector<double> fn, fp, broadcast;
    while (i < rows.size() && rows[i].value == value) {
      const auto& totals = rows[i].result.summary.totals;
      fn.push_back(totals.fn_rate());
      fp.push_back(totals.fp_rate());
      broadcast.push_back(totals.broadcast_rate());
      ++i;
    }
    AxisAggregate agg;
    agg.value = value;
    agg.runs = fn.size();
    agg.fn_mean = mean(fn);
    agg.fn_stderr = standard_error(fn);
    agg.fp_mean = mean(fp);
    agg.fp_stderr = standard_error(fp);
    agg.broadcast_mean = mean(broadcast);
    agg.broadcast_stderr = standard_error(broadcast);
    out.push_back(agg);
  }
  return out;
}

std::string aggregate_csv(const std::vector<AxisAggregate>& aggregates) {
  std::string out = "value,runs,fn_mean,fn_stderr,fp_mean,fp_stderr,broadcast_mean,broadcast_stderr\n";
  char line[256];
  for (const auto& agg : aggregates) {
    std::snprintf(line, sizeof(line), "%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", agg.value,
                  agg.runs, agg.fn_mean, agg.fn_stderr, agg.fp_mean, agg.fp_stderr,
                  agg.broadcast_mean, agg.broadcast_stderr);
    out += line;
  }
  return out;
}

}  // namespace react
