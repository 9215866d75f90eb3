#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace thetadet::cli {

/// Exit codes: 0 all checks passed, 1 a check failed, 2 bad configuration.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

/// Entry point behind the `thetadet` executable: verify | eval | xcheck | bench.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "a+bi", "a-bi", "a", "bi", "i" with optional whitespace. Throws
/// ConfigError quoting the token.
std::complex<double> parse_complex(const std::string& token);

/// Comma-separated complex tokens.
std::vector<std::complex<double>> parse_complex_list(const std::string& text);

/// "a" or inclusive "a..b".
std::pair<int, int> parse_n_range(const std::string& text);

/// Comma-separated reals.
std::vector<double> parse_real_list(const std::string& text);

/// "name=value".
std::pair<std::string, double> parse_tolerance(const std::string& text);

}  // namespace thetadet::cli
