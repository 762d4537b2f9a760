#include "react/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace react {

namespace {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace

RunTotals totals_over(const std::vector<PerSecondRow>& series, double lo, double hi) {
  RunTotals totals;
  for (const auto& row : series) {
    if (row.t < lo || row.t >= hi) continue;
    totals.legit_delivered += row.legit_delivered;
    totals.legit_dropped += row.legit_dropped;
    totals.attack_delivered += row.attack_delivered;
    totals.attack_dropped += row.attack_dropped;
    totals.requests_sent += row.requests_sent;
    totals.retransmissions += row.retransmissions;
    totals.broadcasts += row.broadcasts;
    totals.rules_installed += row.rules_installed;
  }
  return totals;
}

StabilizedSummary summarize(const RunResult& run, double stabilization_time) {
  StabilizedSummary out;
  out.stabilization_time = stabilization_time;
  out.bootstrap = totals_over(run.per_second, 0.0, stabilization_time);
  out.stabilized = totals_over(run.per_second, stabilization_time,
                               static_cast<double>(run.per_second.size()) + 1.0);
  return out;
}

double AnalyticModel::per_window_fp() const {
  const double lambda = load();
  return std::pow(1.0 - std::exp(-k * lambda), k);
}

FnBounds analytic_fn_bounds(const AnalyticModel& model, WindowVariant variant) {
  const double eps = model.per_window_fp();
  const double shift = variant == WindowVariant::two_filter ? 1.0 : 0.0;
  return {1.0 - std::pow(1.0 - eps, model.b - 2 + shift),
          1.0 - std::pow(1.0 - eps, model.b - 1 + shift)};
}

double analytic_false_broadcast_bound(const AnalyticModel& model) {
  if (model.b < 3) {
    throw std::domain_error(
        "false-broadcast bound is undefined for b < 3: no read-only window to check");
  }
  return 1.0 - std::pow(1.0 - model.per_window_fp(), model.b - 2);
}

AnalyticComparison compare_to_analytic(const RunResult& run, const AnalyticModel& model,
                                       double margin) {
  for (const auto& [key, value] : run.config_echo) {
    if (key == "filter.engine" && value != "react") {
      throw std::invalid_argument("compare_to_analytic requires a react-engine run");
    }
  }
  AnalyticComparison out;
  out.measured_fn = run.summary.totals.fn_rate();
  out.bounds = analytic_fn_bounds(model, WindowVariant::standard);
  out.margin = margin;
  out.within =
      out.measured_fn >= out.bounds.low - margin && out.measured_fn <= out.bounds.high + margin;
  return out;
}

std::string per_second_csv(const RunResult& run) {
  std::string out =
      "t,legit_delivered,legit_dropped,attack_delivered,attack_dropped,"
      "requests_sent,retransmissions,broadcasts,rules_installed\n";
  char line[256];
  for (const auto& row : run.per_second) {
    std::snprintf(line, sizeof(line), "%u,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu\n", row.t,
                  static_cast<unsigned long long>(row.legit_delivered),
                  static_cast<unsigned long long>(row.legit_dropped),
                  static_cast<unsigned long long>(row.attack_delivered),
                  static_cast<unsigned long long>(row.attack_dropped),
                  static_cast<unsigned long long>(row.requests_sent),
                  static_cast<unsigned long long>(row.retransmissions),
                  static_cast<unsigned long long>(row.broadcasts),
                  static_cast<unsigned long long>(row.rules_installed));
    out += line;
  }
  return out;
}

std::string summary_csv_header() {
  return "scenario,seed,axis_value,requests_sent,retransmissions,broadcasts,rules_installed,"
         "legit_delivered,legit_dropped,attack_delivered,attack_dropped,fn_rate,fp_rate,"
         "broadcast_rate,stab_fn_rate,stab_fp_rate,stab_broadcast_rate,transactions_failed,"
         "duplicate_responses\n";
}

std::string summary_csv_row(const std::string& scenario, std::uint64_t seed, double axis_value,
                            const RunResult& run, double stabilization_time) {
  const RunTotals& totals = run.summary.totals;
  const StabilizedSummary stab = summarize(run, stabilization_time);
  std::string out = scenario;
  out += ',';
  out += std::to_string(seed);
  out += ',';
  out += format_double(axis_value);
  const auto add_u64 = [&out](std::uint64_t v) {
    out += ',';
    out += std::to_string(v);
  };
  const auto add_double = [&out](double v) {
    out += ',';
    out += format_double(v);
  };
  add_u64(totals.requests_sent);
  add_u64(totals.retransmissions);
  add_u64(totals.broadcasts);
  add_u64(totals.rules_installed);
  add_u64(totals.legit_delivered);
  add_u64(totals.legit_dropped);
  add_u64(totals.attack_delivered);
  add_u64(totals.attack_dropped);
  add_double(totals.fn_rate());
  add_double(totals.fp_rate());
  add_double(totals.broadcast_rate());
  add_double(stab.stabilized.fn_rate());
  add_double(stab.stabilized.fp_rate());
  add_double(stab.stabilized.broadcast_rate());
  add_u64(run.summary.transactions_failed);
  add_u64(run.summary.duplicate_responses);
  out += '\n';
  return out;
}

std::vector<SummaryCsvRow> parse_summary_csv(const std::string& text) {
  std::vector<SummaryCsvRow> rows;
  std::stringstream stream(text);
  std::string line;
  bool first = true;
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;  // header
      continue;
    }
    SummaryCsvRow row;
    std::stringstream fields(line);
    std::string field;
    int index = 0;
    while (std::getline(fields, field, ',')) {
      if (index == 0) {
        row.scenario = field;
      } else if (index == 1) {
        row.seed = std::strtoull(field.c_str(), nullptr, 10);
      } else if (index == 2) {
        row.axis_value = std::strtod(field.c_str(), nullptr);
      } else {
        row.values.push_back(std::strtod(field.c_str(), nullptr));
      }
      ++index;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double standard_error(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  const double variance = ss / static_cast<double>(xs.size() - 1);
  return std::sqrt(variance / static_cast<double>(xs.size()));
}

}  // namespace react
