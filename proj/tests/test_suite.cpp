#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "sampling.hpp"
#include "thetadet/errors.hpp"
#include "thetadet/suite.hpp"

using namespace thetadet;

namespace {

CheckConfig small_config() {
  CheckConfig c;
  c.n_min = 1;
  c.n_max = 3;
  c.samples_per_check = 4;
  c.q_list = {0.3};
  c.seed = 99;
  c.checks = default_verify_checks();
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  CheckConfig c = small_config();
  CHECK_NOTHROW(c.validate());

  c.n_max = 9;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.n_min = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.n_min = 3;
  c.n_max = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.q_list = {0.99};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.q_list = {};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.samples_per_check = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.checks = {"no_such_check"};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.tolerances["no_such_check"] = 1e-3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.tolerances["identity"] = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.threads = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("tolerance schedule and overrides") {
  CHECK(scheduled_tolerance(1) == 1e-10);
  CHECK(scheduled_tolerance(4) == doctest::Approx(6.4e-9));
  CHECK(default_tolerance("identity", 3) == scheduled_tolerance(3));
  CHECK(default_tolerance("theta_oracle", 0) == 1e-12);
  CHECK(default_tolerance("initial", 1) == 1e-13);
  CHECK(default_tolerance("h_shift", 5) == 1e-12);
  CHECK(default_tolerance("prefactor_recursion_plus", 3) == 1e-10);
  CheckConfig c = small_config();
  c.tolerances["identity"] = 1e-15;
  CHECK(tolerance(c, "identity", 2) == 1e-15);
  CHECK(tolerance(c, "h_shift", 2) == 1e-12);
  CHECK(parse_precision("double") == Precision::Double);
  CHECK(parse_precision("extended") == Precision::Extended);
  CHECK_THROWS_AS(parse_precision("quad"), ConfigError);
  for (const auto& name : all_checks()) CHECK(is_known_check(name));
  for (const auto& name : default_verify_checks()) CHECK(is_known_check(name));
  for (const auto& name : xcheck_checks()) CHECK(is_known_check(name));
}

TEST_CASE("a small suite passes and accounts for every record") {
  const VerificationReport report = run_suite(small_config());
  CHECK(report.all_passed());
  int total = 0;
  for (const CheckSummary& s : report.checks) {
    CAPTURE(s.name);
    CAPTURE(s.n);
    CHECK(s.count == 4);
    CHECK(s.passed == s.count);
    CHECK(s.max_residual <= s.tolerance);
    CHECK(s.median_residual <= s.max_residual);
    total += s.count;
  }
  CHECK(static_cast<int>(report.records.size()) == total);
  // Records follow catalog order, then (n, q, sample_index).
  auto position = [](const std::string& name) {
    const auto& names = all_checks();
    return std::find(names.begin(), names.end(), name) - names.begin();
  };
  const bool sorted = std::is_sorted(
      report.records.begin(), report.records.end(),
      [&](const ResidualRecord& a, const ResidualRecord& b) {
        return std::make_tuple(position(a.check_name), a.n, a.q, a.sample_index) <
               std::make_tuple(position(b.check_name), b.n, b.q, b.sample_index);
      });
  CHECK(sorted);
  // Theta-level checks run once per q at n = 0.
  const auto theta = std::find_if(report.checks.begin(), report.checks.end(),
                                  [](const CheckSummary& s) { return s.name == "theta_oddness"; });
  REQUIRE(theta != report.checks.end());
  CHECK(theta->n == 0);
}

TEST_CASE("skipped combinations are explicit") {
  CheckConfig c = small_config();
  c.n_min = 1;
  c.n_max = 2;
  c.checks = {"initial", "n2_relations", "recursion_L_minus"};
  const VerificationReport report = run_suite(c);
  // initial at N = 2, n2_relations at N = 1, recursion at N = 1.
  CHECK(report.skipped.size() == 3);
  for (const SkipRecord& s : report.skipped) CHECK_FALSE(s.reason.empty());

  c.n_min = 6;
  c.n_max = 6;
  c.checks = {"expansion_L"};
  c.samples_per_check = 1;
  const VerificationReport capped = run_suite(c);
  REQUIRE(capped.skipped.size() == 1);
  CHECK(capped.skipped[0].name == "expansion_L");
  CHECK(capped.skipped[0].n == 6);
  CHECK(capped.checks.empty());
}

TEST_CASE("reports are reproducible and independent of threads") {
  CheckConfig c = small_config();
  c.checks = {"identity", "n2_relations", "theta_addition", "quasi_period_R"};
  const std::string serial = report_to_json(run_suite(c), false).dump(2);
  const std::string again = report_to_json(run_suite(c), false).dump(2);
  c.threads = 3;
  const std::string parallel = report_to_json(run_suite(c), false).dump(2);
  CHECK(serial == again);
  CHECK(serial == parallel);
  c.threads = 1;
  CHECK(report_to_csv(run_suite(c)) == report_to_csv(run_suite(c)));

  c.seed = 100;
  CHECK(report_to_json(run_suite(c), false).dump(2) != serial);
}

TEST_CASE("tight tolerance turns into reported failures") {
  CheckConfig c = small_config();
  c.n_min = c.n_max = 2;
  c.checks = {"identity"};
  c.precision = Precision::Double;
  c.tolerances["identity"] = 1e-18;
  const VerificationReport report = run_suite(c);
  CHECK(report.failure_count() == 4);
  REQUIRE(report.checks.size() == 1);
  CHECK(report.checks[0].failures.size() == 4);
  CHECK(report.checks[0].precision == Precision::Double);
  CHECK_FALSE(report.checks[0].failures[0].passed);
}

TEST_CASE("JSON layout and round trip") {
  CheckConfig c = small_config();
  c.checks = {"identity", "initial"};
  const Json j = report_to_json(run_suite(c));
  CHECK(j.contains("config"));
  CHECK(j.contains("checks"));
  CHECK(j.contains("skipped"));
  REQUIRE(j.contains("meta"));
  CHECK(j["meta"]["seed"] == 99);
  CHECK(j["meta"]["version"] == kVersion);
  CHECK(j["meta"].contains("wall_time_s"));
  const Json& first = j["checks"][0];
  for (const char* key : {"name", "n", "q", "count", "passed", "max_residual", "median_residual",
                          "failures"}) {
    CHECK(first.contains(key));
  }
  const std::string text = j.dump(2);
  CHECK(Json::parse(text).dump(2) == text);
  CHECK_FALSE(report_to_json(run_suite(c), false)["meta"].contains("wall_time_s"));
}

TEST_CASE("CSV layout") {
  CheckConfig c = small_config();
  c.checks = {"identity"};
  c.n_max = 1;
  const std::string csv = report_to_csv(run_suite(c));
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "check,n,q,sample_index,residual,tolerance,passed,resampled,inputs,note\r");
  int rows = 0;
  for (std::string line; std::getline(in, line);) {
    CHECK(line.rfind("identity,1,0.3,", 0) == 0);
    // The inputs column holds JSON and is quoted.
    CHECK(line.find("\"{\"\"z\"\"") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("float formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-10) == "1e-10");
  CHECK(format_double(0.30000000000000004) == "0.30000000000000004");
  CHECK(format_double(2.0) == "2");
  CHECK(std::stod(format_double(1.0 / 3)) == 1.0 / 3);
}

TEST_CASE("sampler streams") {
  using namespace sampling;
  CHECK(stream_seed(1, "identity", 2, 0.5, 3) == stream_seed(1, "identity", 2, 0.5, 3));
  CHECK(stream_seed(1, "identity", 2, 0.5, 3) != stream_seed(1, "identity", 2, 0.5, 4));
  CHECK(stream_seed(1, "identity", 2, 0.5, 3) != stream_seed(1, "initial", 2, 0.5, 3));
  Stream s(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = s.uniform(-0.45, 0.45);
    CHECK(u > -0.45);
    CHECK(u < 0.45);
  }
}
