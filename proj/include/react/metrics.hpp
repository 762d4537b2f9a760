#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace react {

struct PerSecondRow {
  std::uint32_t t = 0;
  std::uint64_t legit_delivered = 0;
  std::uint64_t legit_dropped = 0;
  std::uint64_t attack_delivered = 0;
  std::uint64_t attack_dropped = 0;
  std::uint64_t requests_sent = 0;  // includes retransmissions
  std::uint64_t retransmissions = 0;
  std::uint64_t broadcasts = 0;
  std::uint64_t rules_installed = 0;

  friend bool operator==(const PerSecondRow&, const PerSecondRow&) = default;
};

// Rates are 0 whenever their denominator is 0.
inline double safe_ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

struct RunTotals {
  std::uint64_t legit_delivered = 0;
  std::uint64_t legit_dropped = 0;
  std::uint64_t attack_delivered = 0;
  std::uint64_t attack_dropped = 0;
  std::uint64_t requests_sent = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t broadcasts = 0;
  std::uint64_t rules_installed = 0;

  double fn_rate() const {
    return safe_ratio(static_cast<double>(attack_delivered),
                      static_cast<double>(attack_delivered + attack_dropped));
  }
  double fp_rate() const {
    return safe_ratio(static_cast<double>(legit_dropped),
                      static_cast<double>(legit_dropped + legit_delivered));
  }
  double broadcast_rate() const {
    return safe_ratio(static_cast<double>(broadcasts), static_cast<double>(requests_sent));
  }

  friend bool operator==(const RunTotals&, const RunTotals&) = default;
};

struct RunSummary {
  RunTotals totals;
  std::uint64_t transactions_started = 0;
  std::uint64_t transactions_resolved = 0;
  std::uint64_t transactions_failed = 0;
  std::uint64_t duplicate_responses = 0;
  std::uint64_t responses_generated = 0;
  std::uint64_t forward_copies = 0;
  std::uint64_t rule_install_copies = 0;
  std::uint64_t response_broadcasts = 0;
  std::uint64_t protocol_errors = 0;
  std::uint64_t capacity_evictions = 0;
  std::uint64_t filter_rotations = 0;
  std::uint64_t max_forwarded_requests = 0;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct RunResult {
  std::vector<PerSecondRow> per_second;
  RunSummary summary;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::uint64_t seed = 0;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

// Totals over the bins with lo <= t < hi.
RunTotals totals_over(const std::vector<PerSecondRow>& series, double lo, double hi);

struct StabilizedSummary {
  RunTotals bootstrap;   // t < stabilization_time
  RunTotals stabilized;  // t >= stabilization_time
  double stabilization_time = 10.0;
};

StabilizedSummary summarize(const RunResult& run, double stabilization_time);

// Closed-form model: load lambda = b*r*tau/s on each window gives a
// per-window false positive rate eps = (1 - e^{-k*lambda})^k; the overall
// misclassification probability moves between 1-(1-eps)^(b-2) just after a
// rotation and 1-(1-eps)^(b-1) just before. The two-filter variant shifts
// both exponents up by one.
struct AnalyticModel {
  double b = 4;
  double k = 2;
  double r = 1000;
  double tau = 4;
  double s = 4 * 131072.0;

  double load() const { return b * r * tau / s; }
  double per_window_fp() const;
};

enum class WindowVariant { standard, two_filter };

struct FnBounds {
  double low = 0;
  double high = 0;
};

FnBounds analytic_fn_bounds(const AnalyticModel& model, WindowVariant variant);

// Upper bound on requests misclassified as retransmissions when the write
// window is excluded from the check. Throws std::domain_error for b < 3
// (no read-only window exists to check).
double analytic_false_broadcast_bound(const AnalyticModel& model);

struct AnalyticComparison {
  double measured_fn = 0;
  FnBounds bounds;
  double margin = 0;
  bool within = false;
};

// Compares a run's false negative rate with the closed-form band widened by
// the given margin. The run must have used the react engine.
AnalyticComparison compare_to_analytic(const RunResult& run, const AnalyticModel& model,
                                       double margin);

// CSV schemas. Doubles are printed with %.17g so re-parsing reproduces the
// value exactly.
std::string per_second_csv(const RunResult& run);
std::string summary_csv_header();
std::string summary_csv_row(const std::string& scenario, std::uint64_t seed, double axis_value,
                            const RunResult& run, double stabilization_time);

struct SummaryCsvRow {
  std::string scenario;
  std::uint64_t seed = 0;
  double axis_value = 0;
  std::vector<double> values;  // numeric columns after the leading three
};

std::vector<SummaryCsvRow> parse_summary_csv(const std::string& text);

double mean(const std::vector<double>& xs);
double standard_error(const std::vector<double>& xs);

}  // namespace react
