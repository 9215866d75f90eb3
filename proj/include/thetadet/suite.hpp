#pragma once

// Randomized verification suite: a catalog of named checks, a deterministic
// sampler, a thread-parallel runner and the aggregated report.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace thetadet {

using Json = nlohmann::ordered_json;

/// Working precision of a check: IEEE double, or double-double (~32 digits).
enum class Precision { Double, Extended };

std::string to_string(Precision p);
Precision parse_precision(const std::string& text);

struct CheckConfig {
  int n_min = 1;
  int n_max = 4;
  int samples_per_check = 50;
  std::vector<double> q_list{0.3, 0.5};
  std::uint64_t seed = 42;
  /// Fixed tolerances replacing the default of the named check.
  std::map<std::string, double> tolerances;
  std::vector<std::string> checks;
  /// Unset: every check runs at its own default precision.
  std::optional<Precision> precision;
  /// Worker threads; not part of the report.
  int threads = 1;

  /// Throws ConfigError on out-of-range values or unknown names.
  void validate() const;
};

/// Check names in catalog order.
const std::vector<std::string>& all_checks();
/// Checks run by `verify` when none are named.
const std::vector<std::string>& default_verify_checks();
/// Checks run by `xcheck`.
const std::vector<std::string>& xcheck_checks();

bool is_known_check(const std::string& name);

/// tol(N) = 1e-10 * 4^(N-1).
double scheduled_tolerance(int n);

/// Default tolerance of `name` at size n, before overrides.
double default_tolerance(const std::string& name, int n);

/// Tolerance after applying the config's overrides.
double tolerance(const CheckConfig& config, const std::string& name, int n);

/// Precision a check runs at when the config does not force one.
Precision default_precision(const std::string& name);

struct ResidualRecord {
  std::string check_name;
  /// Problem size; 0 for checks on the theta function alone.
  int n = 0;
  double q = 0;
  int sample_index = 0;
  Json inputs;
  double residual = 0;
  bool passed = false;
  /// Draws discarded (singular or degenerate) before this sample.
  int resampled = 0;
  /// Set when the sample could not be evaluated at all.
  std::string note;
};

struct CheckSummary {
  std::string name;
  int n = 0;
  double q = 0;
  Precision precision = Precision::Double;
  double tolerance = 0;
  int count = 0;
  int passed = 0;
  double max_residual = 0;
  double median_residual = 0;
  int resampled = 0;
  std::vector<ResidualRecord> failures;
};

struct SkipRecord {
  std::string name;
  int n = 0;
  double q = 0;
  std::string reason;
};

struct VerificationReport {
  CheckConfig config;
  std::vector<CheckSummary> checks;
  std::vector<SkipRecord> skipped;
  /// Every record, sorted by (check, n, q, sample_index).
  std::vector<ResidualRecord> records;
  double wall_time_s = 0;
  /// Summed evaluation time per check name.
  std::map<std::string, double> check_time_s;

  int failure_count() const;
  bool all_passed() const { return failure_count() == 0; }
};

/// Runs every (check, N, q) combination of the config. Per-sample failures
/// are recorded, never thrown; only ConfigError escapes.
VerificationReport run_suite(const CheckConfig& config);

/// {config, checks, skipped, meta}. With `include_timing` false the
/// wall-time fields are omitted, leaving the reproducible body only.
Json report_to_json(const VerificationReport& report, bool include_timing = true);

/// One record per row with a fixed header, RFC 4180 quoting.
std::string report_to_csv(const VerificationReport& report);

/// 17-significant-digit cap, shortest form that round-trips.
std::string format_double(double x);

inline constexpr const char* kVersion = "1.0.0";

}  // namespace thetadet
