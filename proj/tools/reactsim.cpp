// reactsim: scenario runner for the request/response-matching defense.
//
// Subcommands:
//   run       execute one scenario and emit per-second + summary CSVs
//   sweep     run a scenario across an axis of values and seeds
//   analyze   print the closed-form load/misclassification figures
//   validate  check a scenario file against the run assumptions
//
// Exit codes: 0 success, 1 usage/parse error, 2 validation failure,
// 3 runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "react/metrics.hpp"
#include "react/scenario.hpp"
#include "react/simulator.hpp"
#include "react/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string scenario_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

react::ScenarioConfig load_with_overrides(const std::string& path,
                                          const std::vector<std::string>& overrides) {
  react::ScenarioConfig config;
  try {
    config = react::load_scenario_file(path);
  } catch (const std::exception& err) {
    throw UsageError(err.what());
  }
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw UsageError("--set expects path=value, got '" + item + "'");
    }
    try {
      react::set_config_field(config, item.substr(0, eq), item.substr(eq + 1));
    } catch (const std::exception& err) {
      throw UsageError(err.what());
    }
  }
  return config;
}

// Prints warnings, throws ValidationError when any violation is an error.
void enforce_valid(const react::ScenarioConfig& config) {
  const auto violations = react::validate_config(config);
  std::string errors;
  for (const auto& violation : violations) {
    if (violation.severity == react::Violation::Severity::warning) {
      std::cerr << "warning: " << violation.message << "\n";
    } else {
      errors += "  " + violation.message + "\n";
    }
  }
  if (!errors.empty()) throw ValidationError("scenario fails validation:\n" + errors);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + path.string() + "'");
  file << content;
}

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    char* end = nullptr;
    const double value = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0') {
      throw UsageError("invalid numeric value '" + item + "'");
    }
    out.push_back(value);
  }
  if (out.empty()) throw UsageError("expected a comma-separated list of numbers");
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (double value : parse_value_list(text)) out.push_back(static_cast<std::uint64_t>(value));
  return out;
}

void print_percent(const char* label, double value) {
  std::printf("%-22s: %.4f%%\n", label, value * 100.0);
}

void print_run_summary(const std::string& stem, std::uint64_t seed, const react::RunResult& run,
                       double stabilization_time) {
  const auto& totals = run.summary.totals;
  const auto stab = react::summarize(run, stabilization_time);
  std::printf("%-22s: %s\n", "scenario", stem.c_str());
  std::printf("%-22s: %llu\n", "seed", static_cast<unsigned long long>(seed));
  std::printf("%-22s: %llu (retransmissions %llu)\n", "requests sent",
              static_cast<unsigned long long>(totals.requests_sent),
              static_cast<unsigned long long>(totals.retransmissions));
  std::printf("%-22s: %llu / %llu\n", "legit delivered/dropped",
              static_cast<unsigned long long>(totals.legit_delivered),
              static_cast<unsigned long long>(totals.legit_dropped));
  std::printf("%-22s: %llu / %llu\n", "attack delivered/dropped",
              static_cast<unsigned long long>(totals.attack_delivered),
              static_cast<unsigned long long>(totals.attack_dropped));
  print_percent("fn rate", totals.fn_rate());
  print_percent("fp rate", totals.fp_rate());
  print_percent("broadcast rate", totals.broadcast_rate());
  std::printf("%-22s: %llu\n", "rules installed",
              static_cast<unsigned long long>(totals.rules_installed));
  std::printf("after t=%g s:\n", stabilization_time);
  print_percent("  fn rate", stab.stabilized.fn_rate());
  print_percent("  fp rate", stab.stabilized.fp_rate());
  print_percent("  broadcast rate", stab.stabilized.broadcast_rate());
}

int cmd_run(const std::string& path, std::uint64_t seed, const std::string& out_dir_flag,
            bool trace_flag, const std::vector<std::string>& overrides) {
  react::ScenarioConfig config = load_with_overrides(path, overrides);
  enforce_valid(config);
  const std::string out_dir = out_dir_flag.empty() ? config.outputs.csv_dir : out_dir_flag;
  std::filesystem::create_directories(out_dir);

  const std::string stem = scenario_stem(path);
  std::ostringstream trace;
  react::RunOptions options;
  if (trace_flag || config.outputs.trace) options.trace = &trace;

  const react::RunResult run = react::run_scenario(config, seed, options);

  const auto base = std::filesystem::path(out_dir) / (stem + "-seed" + std::to_string(seed));
  if (options.trace != nullptr) write_file(base.string() + ".trace", trace.str());
  write_file(base.string() + ".csv", react::per_second_csv(run));
  write_file(base.string() + "-summary.csv",
             react::summary_csv_header() + react::summary_csv_row(stem, seed, 0.0, run, 10.0));
  print_run_summary(stem, seed, run, 10.0);
  return kExitOk;
}

int cmd_sweep(const std::string& path, const std::string& axis, const std::string& values_text,
              const std::string& seeds_text, unsigned jobs, const std::string& out_dir_flag,
              const std::vector<std::string>& overrides) {
  react::SweepSpec spec;
  spec.base = load_with_overrides(path, overrides);
  spec.axis = axis;
  spec.values = parse_value_list(values_text);
  spec.seeds = parse_seed_list(seeds_text);
  spec.jobs = jobs;

  const std::string out_dir = out_dir_flag.empty() ? spec.base.outputs.csv_dir : out_dir_flag;
  std::filesystem::create_directories(out_dir);

  std::vector<react::SweepRow> rows;
  try {
    rows = react::run_sweep(spec);
  } catch (const std::runtime_error& err) {
    const std::string what = err.what();
    if (what.find("unknown sweep axis") != std::string::npos) throw UsageError(what);
    if (what.find("fails validation") != std::string::npos) throw ValidationError(what);
    throw;
  }

  const std::string stem = scenario_stem(path);
  std::string axis_tag = axis;
  for (char& c : axis_tag) {
    if (c == '.') c = '_';
  }

  std::string summary = react::summary_csv_header();
  for (const auto& row : rows) {
    summary += react::summary_csv_row(stem, row.seed, row.value, row.result,
                                      spec.stabilization_time);
  }
  const auto base = std::filesystem::path(out_dir) / (stem + "-" + axis_tag);
  write_file(base.string() + "-summary.csv", summary);

  const auto aggregates = react::aggregate_sweep(rows);
  write_file(base.string() + "-aggregate.csv", react::aggregate_csv(aggregates));

  std::printf("%-14s %5s %12s %12s %12s\n", axis.c_str(), "runs", "fn_mean", "fp_mean",
              "bcast_mean");
  for (const auto& agg : aggregates) {
    std::printf("%-14g %5zu %12.6f %12.6f %12.6f\n", agg.value, agg.runs, agg.fn_mean, agg.fp_mean,
                agg.broadcast_mean);
  }
  return kExitOk;
}

int cmd_analyze(double b, double k, double r, double tau, double s, const std::string& variant) {
  if (b < 2 || k < 1 || r <= 0 || tau <= 0 || s <= 0) {
    throw UsageError("analyze parameters must be positive (b >= 2, k >= 1)");
  }
  const react::AnalyticModel model{b, k, r, tau, s};
  const auto window_variant = variant == "two_filter" ? react::WindowVariant::two_filter
                                                      : react::WindowVariant::standard;
  const auto bounds = react::analytic_fn_bounds(model, window_variant);
  std::printf("%-28s: %.6f\n", "load per window (lambda)", model.load());
  std::printf("%-28s: %.6f\n", "per-window fp rate (eps)", model.per_window_fp());
  std::printf("%-28s: [%.6f, %.6f]\n", "fn bounds (after/before swap)", bounds.low, bounds.high);
  if (window_variant == react::WindowVariant::standard && b >= 3) {
    std::printf("%-28s: %.6f\n", "false-broadcast bound",
                react::analytic_false_broadcast_bound(model));
  } else {
    std::printf("%-28s: n/a (needs a read-only window, b >= 3)\n", "false-broadcast bound");
  }
  return kExitOk;
}

int cmd_validate(const std::string& path, const std::vector<std::string>& overrides) {
  react::ScenarioConfig config = load_with_overrides(path, overrides);
  const auto violations = react::validate_config(config);
  for (const auto& violation : violations) {
    std::cout << (violation.severity == react::Violation::Severity::error ? "error: " : "warning: ")
              << violation.message << "\n";
  }
  if (react::has_errors(violations)) return kExitValidation;
  std::cout << "ok\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"request/response matching defense simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool trace = false;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "execute one scenario");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  run->add_option("--seed", seed, "run seed");
  run->add_option("--out-dir", out_dir, "output directory (default: outputs.csv_dir)");
  run->add_flag("--trace", trace, "write a per-packet trace file");
  run->add_option("--set", overrides, "override a config field (path=value)");

  std::string axis;
  std::string values_text;
  std::string seeds_text = "1";
  unsigned jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "run across an axis of values and seeds");
  sweep->add_option("scenario", scenario_path, "scenario file")->required();
  sweep->add_option("--axis", axis, "numeric config path to vary")->required();
  sweep->add_option("--values", values_text, "comma-separated values")->required();
  sweep->add_option("--seeds", seeds_text, "comma-separated seeds");
  sweep->add_option("--jobs", jobs, "parallel runs");
  sweep->add_option("--out-dir", out_dir, "output directory");
  sweep->add_option("--set", overrides, "override a config field (path=value)");

  double b = 4, k = 2, r = 1000, tau = 4, s = 4 * 131072.0;
  std::string variant = "standard";
  auto* analyze = app.add_subcommand("analyze", "print closed-form figures");
  analyze->add_option("--b", b, "number of windows");
  analyze->add_option("--k", k, "hash functions");
  analyze->add_option("--r", r, "requests per second");
  analyze->add_option("--tau", tau, "rotation interval (s)");
  analyze->add_option("--s", s, "total filter bits across windows");
  analyze->add_option("--variant", variant, "standard | two_filter")
      ->check(CLI::IsMember({"standard", "two_filter"}));

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("scenario", scenario_path, "scenario file")->required();
  validate->add_option("--set", overrides, "override a config field (path=value)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return err.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(scenario_path, seed, out_dir, trace, overrides);
    if (sweep->parsed()) {
      return cmd_sweep(scenario_path, axis, values_text, seeds_text, jobs, out_dir, overrides);
    }
    if (analyze->parsed()) return cmd_analyze(b, k, r, tau, s, variant);
    if (validate->parsed()) return cmd_validate(scenario_path, overrides);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
