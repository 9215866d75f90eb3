#include "thetadet/suite.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "sampling.hpp"
#include "thetadet/double_double.hpp"
#include "thetadet/errors.hpp"
#include "thetadet/korepin.hpp"

namespace thetadet {

namespace {

using sampling::Stream;

enum class Applies { ThetaOnly, Any, AtLeastTwo, OnlyOne, OnlyTwo, UpToFive, UpToSix };

struct CheckSpec {
  const char* name;
  Applies applies;
  /// 0: scheduled tol(N); otherwise fixed.
  double tolerance;
  Precision precision;
};

constexpr double kScheduled = 0;

const std::vector<CheckSpec>& catalog() {
  static const std::vector<CheckSpec> specs{
      {"theta_oracle", Applies::ThetaOnly, 1e-12, Precision::Double},
      {"theta_oddness", Applies::ThetaOnly, 1e-11, Precision::Double},
      {"theta_period_one", Applies::ThetaOnly, 1e-11, Precision::Double},
      {"theta_period_tau", Applies::ThetaOnly, 1e-11, Precision::Double},
      {"theta_half_period", Applies::ThetaOnly, 1e-11, Precision::Double},
      {"theta_addition", Applies::ThetaOnly, 1e-10, Precision::Double},
      {"det_oracle", Applies::UpToSix, 1e-12, Precision::Double},
      {"identity", Applies::Any, kScheduled, Precision::Extended},
      {"expansion_L", Applies::UpToFive, 1e-10, Precision::Extended},
      {"n2_closed_forms", Applies::OnlyTwo, 1e-11, Precision::Extended},
      {"n2_relations", Applies::OnlyTwo, 1e-11, Precision::Double},
      {"initial", Applies::OnlyOne, 1e-13, Precision::Double},
      {"recursion_L_minus", Applies::AtLeastTwo, kScheduled, Precision::Extended},
      {"recursion_L_plus", Applies::AtLeastTwo, kScheduled, Precision::Extended},
      {"recursion_R_minus", Applies::AtLeastTwo, kScheduled, Precision::Extended},
      {"recursion_R_plus", Applies::AtLeastTwo, kScheduled, Precision::Extended},
      {"quasi_period_L", Applies::Any, kScheduled, Precision::Extended},
      {"quasi_period_R", Applies::Any, kScheduled, Precision::Extended},
      {"prefactor_recursion_minus", Applies::AtLeastTwo, 1e-10, Precision::Double},
      {"prefactor_recursion_plus", Applies::AtLeastTwo, 1e-10, Precision::Double},
      {"h_shift", Applies::Any, 1e-12, Precision::Double},
      {"det_Y_collision", Applies::AtLeastTwo, 1e-11, Precision::Double},
      {"det_X_zero_column", Applies::Any, 1e-11, Precision::Double},
      {"holomorphy_R", Applies::AtLeastTwo, 1e6, Precision::Double},
  };
  return specs;
}

const CheckSpec& spec_of(const std::string& name) {
  for (const auto& s : catalog()) {
    if (name == s.name) return s;
  }
  throw ConfigError("unknown check '" + name + "'");
}

std::size_t catalog_index(const std::string& name) {
  const auto& specs = catalog();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (name == specs[i].name) return i;
  }
  return specs.size();
}

/// Reason a check does not run at size n, or empty.
std::string skip_reason(Applies applies, int n) {
  switch (applies) {
    case Applies::ThetaOnly:
    case Applies::Any: return {};
    case Applies::AtLeastTwo: return n >= 2 ? "" : "requires N >= 2";
    case Applies::OnlyOne: return n == 1 ? "" : "1-point initial condition, N = 1 only";
    case Applies::OnlyTwo: return n == 2 ? "" : "defined for N = 2 only";
    case Applies::UpToFive: return n <= 5 ? "" : "expansion oracle capped at N = 5";
    case Applies::UpToSix: return n <= 6 ? "" : "Leibniz expansion capped at dimension 6";
  }
  return {};
}

// ---- inputs serialization ---------------------------------------------------

template <typename Scalar>
Json complex_json(const std::complex<Scalar>& c) {
  return Json::array({static_cast<double>(c.real()), static_cast<double>(c.imag())});
}

template <typename Scalar>
Json vector_json(const ComplexVector<Scalar>& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

Json params_json(const ParameterSet<double>& ps) {
  return Json{{"z", vector_json(ps.z)}, {"w", vector_json(ps.w)}, {"h", complex_json(ps.h)}};
}

template <typename Scalar>
ParameterSet<Scalar> widen(const ParameterSet<double>& ps) {
  ComplexVector<Scalar> z(ps.n()), w(ps.n());
  for (int i = 0; i < ps.n(); ++i) {
    z(i) = std::complex<Scalar>(ps.z(i).real(), ps.z(i).imag());
    w(i) = std::complex<Scalar>(ps.w(i).real(), ps.w(i).imag());
  }
  return {z, w, std::complex<Scalar>(ps.h.real(), ps.h.imag())};
}

template <typename Scalar>
std::complex<Scalar> widen(const std::complex<double>& c) {
  return {Scalar(c.real()), Scalar(c.imag())};
}

// ---- kernels ------------------------------------------------------------------

struct Outcome {
  double residual = 0;
  Json inputs;
};

/// One attempt of one check. Throws SingularityError / DegenerateScale to
/// request a fresh draw.
template <typename Scalar>
Outcome evaluate(const std::string& name, Stream& s, int n, const NomeContext<double>& dctx,
                 const NomeContext<Scalar>& ctx) {
  using C = std::complex<Scalar>;
  auto d = [](const Scalar& x) { return static_cast<double>(x); };
  const double tau_im = dctx.tau_im();

  if (name.starts_with("theta_")) {
    if (name == "theta_addition") {
      std::complex<double> v[4];
      for (auto& x : v) x = sampling::coordinate(s, tau_im);
      const Scalar r = addition_formula_residual(widen<Scalar>(v[0]), widen<Scalar>(v[1]),
                                                 widen<Scalar>(v[2]), widen<Scalar>(v[3]), ctx);
      return {d(r), Json{{"u", complex_json(v[0])},
                         {"v", complex_json(v[1])},
                         {"x", complex_json(v[2])},
                         {"y", complex_json(v[3])}}};
    }
    const double re = s.uniform(-1, 1);
    const std::complex<double> u0(re, s.uniform(0, tau_im / 2));
    const C u = widen<Scalar>(u0);
    Json inputs{{"u", complex_json(u0)}};
    if (name == "theta_oracle") {
      return {d(symmetric_residual(theta(u, ctx), theta_series_oracle(u, ctx))), inputs};
    }
    if (name == "theta_oddness") {
      return {d(symmetric_residual(theta(-u, ctx), -theta(u, ctx))), inputs};
    }
    if (name == "theta_half_period") return {d(half_period_residual(u, ctx)), inputs};
    const auto [one, tau] = quasi_period_residuals(u, ctx);
    return {d(name == "theta_period_one" ? one : tau), inputs};
  }

  if (name == "det_oracle") {
    SquareMatrix<Scalar> m(n, n);
    Json entries = Json::array();
    for (int i = 0; i < n * n; ++i) {
      const double r = std::sqrt(s.uniform(0, 1));
      const double phi = s.uniform(0, 2 * std::numbers::pi);
      const std::complex<double> e = std::polar(r, phi);
      m(i / n, i % n) = widen<Scalar>(e);
      entries.push_back(complex_json(e));
    }
    const Scalar r = symmetric_residual(det_lu(m).value, det_expansion_oracle(m));
    return {d(r), Json{{"matrix", entries}}};
  }

  const ParameterSet<double> base = sampling::parameters(s, n, dctx);
  const ParameterSet<Scalar> ps = widen<Scalar>(base);
  Json inputs = params_json(base);

  if (name == "identity") return {d(identity_residual(ps, ctx).residual), inputs};
  if (name == "expansion_L") {
    // Near a zero of L_N the signed sum cancels past the working precision;
    // such draws count as forced zeros.
    const ExpansionSum<Scalar> sum = expansion_sum_L(ps, ctx);
    using std::abs;
    if (!(abs(sum.value) >= Scalar(kDegenerateFraction) * sum.largest_term)) {
      throw DegenerateScale("expansion sum cancels below the forced-zero threshold");
    }
    return {d(symmetric_residual(sum.value, eval_L(ps, ctx))), inputs};
  }
  if (name == "n2_closed_forms") {
    const C closed = n2_closed_form(ps, ctx);
    const Scalar rx = symmetric_residual(closed, det_lu(build_X(ps, ctx)).value);
    const Scalar ry =
        symmetric_residual(closed, prefactor(ps, ctx) * det_lu(build_Y(ps, ctx)).value);
    return {d(std::max(rx, ry)), inputs};
  }
  if (name == "n2_relations") {
    const auto r = check_n2_relations(ps, ctx);
    return {d(*std::max_element(r.begin(), r.end())), inputs};
  }
  if (name == "initial") {
    const auto [l, r] = check_initial(ps.z(0), ps.w(0), ps.h, ctx);
    return {d(std::max(l, r)), inputs};
  }
  if (name.starts_with("recursion_")) {
    const Side side = name[10] == 'L' ? Side::L : Side::R;
    const Sign sign = name.ends_with("minus") ? Sign::Minus : Sign::Plus;
    Scalar worst(0);
    for (int m = 1; m <= n; ++m) worst = std::max(worst, check_recursion(side, sign, ps, m, ctx));
    return {d(worst), inputs};
  }
  if (name.starts_with("quasi_period_")) {
    const Side side = name.ends_with('L') ? Side::L : Side::R;
    const auto [one, tau] = check_wN_quasi_periodicity(side, ps, ctx);
    return {d(std::max(one, tau)), inputs};
  }
  if (name.starts_with("prefactor_recursion_")) {
    const Sign sign = name.ends_with("minus") ? Sign::Minus : Sign::Plus;
    return {d(check_prefactor_recursion(sign, ps, ctx)), inputs};
  }
  if (name == "h_shift") return {d(check_h_shift_identity(ps.h, n, ctx)), inputs};
  if (name == "det_Y_collision") {
    const int j = 1 + s.index(n - 1);
    inputs["j"] = j;
    return {d(det_Y_collision_residual(ps, j, ctx)), inputs};
  }
  if (name == "det_X_zero_column") {
    const int k = 1 + s.index(n);
    inputs["k"] = k;
    return {d(det_X_zero_column_residual(ps, k, ctx)), inputs};
  }
  if (name == "holomorphy_R") {
    const int j = 1 + s.index(n - 1);
    inputs["j"] = j;
    return {d(holomorphy_ratio(ps, j, ctx)), inputs};
  }
  throw ConfigError("unknown check '" + name + "'");
}

struct Contexts {
  NomeContext<double> d;
  NomeContext<DoubleDouble> dd;
};

struct Task {
  std::string name;
  int n;
  double q;
  int sample_index;
  Precision precision;
  double tolerance;
  const Contexts* ctx;
};

ResidualRecord run_task(const Task& t, std::uint64_t seed) {
  ResidualRecord rec;
  rec.check_name = t.name;
  rec.n = t.n;
  rec.q = t.q;
  rec.sample_index = t.sample_index;
  Stream stream(sampling::stream_seed(seed, t.name, t.n, t.q, t.sample_index));
  for (int attempt = 0; attempt < sampling::kMaxAttempts; ++attempt) {
    try {
      const Outcome out =
          t.precision == Precision::Double
              ? evaluate<double>(t.name, stream, t.n, t.ctx->d, t.ctx->d)
              : evaluate<DoubleDouble>(t.name, stream, t.n, t.ctx->d, t.ctx->dd);
      rec.inputs = out.inputs;
      rec.residual = out.residual;
      rec.passed = std::isfinite(out.residual) && out.residual <= t.tolerance;
      return rec;
    } catch (const SingularityError&) {
      ++rec.resampled;
    } catch (const DegenerateScale&) {
      ++rec.resampled;
    } catch (const std::exception& e) {
      rec.residual = std::numeric_limits<double>::infinity();
      rec.note = e.what();
      return rec;
    }
  }
  rec.residual = std::numeric_limits<double>::infinity();
  rec.note = "no admissible sample within the attempt limit";
  return rec;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

std::string to_string(Precision p) { return p == Precision::Double ? "double" : "extended"; }

Precision parse_precision(const std::string& text) {
  if (text == "double") return Precision::Double;
  if (text == "extended") return Precision::Extended;
  throw ConfigError("precision must be 'double' or 'extended', got '" + text + "'");
}

const std::vector<std::string>& all_checks() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& s : catalog()) out.emplace_back(s.name);
    return out;
  }();
  return names;
}

const std::vector<std::string>& default_verify_checks() {
  static const std::vector<std::string> names{
      "theta_oddness",     "theta_period_one",   "theta_period_tau",
      "theta_half_period", "theta_addition",     "identity",
      "n2_closed_forms",   "n2_relations",       "initial",
      "recursion_L_minus", "recursion_L_plus",   "recursion_R_minus",
      "recursion_R_plus",  "quasi_period_L",     "quasi_period_R",
      "prefactor_recursion_minus", "prefactor_recursion_plus", "h_shift",
      "det_Y_collision",   "det_X_zero_column",  "holomorphy_R"};
  return names;
}

const std::vector<std::string>& xcheck_checks() {
  static const std::vector<std::string> names{"theta_oracle", "det_oracle", "expansion_L"};
  return names;
}

bool is_known_check(const std::string& name) { return catalog_index(name) < catalog().size(); }

double scheduled_tolerance(int n) { return 1e-10 * std::pow(4.0, n - 1); }

double default_tolerance(const std::string& name, int n) {
  const CheckSpec& s = spec_of(name);
  return s.tolerance == kScheduled ? scheduled_tolerance(n) : s.tolerance;
}

double tolerance(const CheckConfig& config, const std::string& name, int n) {
  if (auto it = config.tolerances.find(name); it != config.tolerances.end()) return it->second;
  return default_tolerance(name, n);
}

Precision default_precision(const std::string& name) { return spec_of(name).precision; }

void CheckConfig::validate() const {
  if (n_min < 1 || n_max > 8 || n_min > n_max) {
    throw ConfigError("n range must satisfy 1 <= a <= b <= 8");
  }
  if (samples_per_check < 1) throw ConfigError("samples must be at least 1");
  if (q_list.empty()) throw ConfigError("q list is empty");
  for (double q : q_list) {
    if (!(q > 0 && q <= 0.95)) {
      throw ConfigError("q = " + format_double(q) + " outside (0, 0.95]");
    }
  }
  for (const auto& [name, value] : tolerances) {
    if (!is_known_check(name)) throw ConfigError("tolerance for unknown check '" + name + "'");
    if (!(value > 0) || !std::isfinite(value)) {
      throw ConfigError("tolerance for '" + name + "' must be positive");
    }
  }
  if (checks.empty()) throw ConfigError("no checks selected");
  for (const auto& name : checks) {
    if (!is_known_check(name)) throw ConfigError("unknown check '" + name + "'");
  }
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

int VerificationReport::failure_count() const {
  int failures = 0;
  for (const auto& c : checks) failures += c.count - c.passed;
  return failures;
}

VerificationReport run_suite(const CheckConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::string> names = config.checks;
  std::sort(names.begin(), names.end(),
            [](const auto& a, const auto& b) { return catalog_index(a) < catalog_index(b); });
  names.erase(std::unique(names.begin(), names.end()), names.end());

  std::vector<double> qs = config.q_list;
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  std::map<double, Contexts> contexts;
  for (double q : qs) {
    contexts.emplace(q, Contexts{NomeContext<double>(q), NomeContext<DoubleDouble>(q)});
  }

  VerificationReport report;
  report.config = config;

  std::vector<Task> tasks;
  for (const auto& name : names) {
    const CheckSpec& spec = spec_of(name);
    const Precision precision = config.precision.value_or(spec.precision);
    std::vector<int> sizes;
    if (spec.applies == Applies::ThetaOnly) {
      sizes.push_back(0);
    } else {
      for (int n = config.n_min; n <= config.n_max; ++n) sizes.push_back(n);
    }
    for (int n : sizes) {
      for (double q : qs) {
        if (const std::string why = skip_reason(spec.applies, n); !why.empty()) {
          report.skipped.push_back({name, n, q, why});
          continue;
        }
        CheckSummary summary;
        summary.name = name;
        summary.n = n;
        summary.q = q;
        summary.precision = precision;
        summary.tolerance = tolerance(config, name, n);
        report.checks.push_back(summary);
        for (int i = 0; i < config.samples_per_check; ++i) {
          tasks.push_back({name, n, q, i, precision, summary.tolerance, &contexts.at(q)});
        }
      }
    }
  }

  std::vector<ResidualRecord> records(tasks.size());
  std::vector<double> task_time(tasks.size(), 0.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto t0 = std::chrono::steady_clock::now();
      records[i] = run_task(tasks[i], config.seed);
      task_time[i] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(tasks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < tasks.size(); ++i) report.check_time_s[tasks[i].name] += task_time[i];

  // Tasks were emitted in (check, n, q, index) order, so records already sit
  // in key order; the summaries consume them in the same order.
  std::size_t cursor = 0;
  for (auto& summary : report.checks) {
    std::vector<double> residuals;
    for (int i = 0; i < config.samples_per_check; ++i, ++cursor) {
      const ResidualRecord& rec = records[cursor];
      ++summary.count;
      summary.passed += rec.passed ? 1 : 0;
      summary.resampled += rec.resampled;
      summary.max_residual = std::isnan(rec.residual)
                                 ? std::numeric_limits<double>::infinity()
                                 : std::max(summary.max_residual, rec.residual);
      residuals.push_back(rec.residual);
      if (!rec.passed) summary.failures.push_back(rec);
    }
    summary.median_residual = median_of(std::move(residuals));
  }
  report.records = std::move(records);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---- serialization --------------------------------------------------------------

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

Json record_json(const ResidualRecord& r) {
  Json out{{"check_name", r.check_name}, {"n", r.n},           {"q", r.q},
           {"sample_index", r.sample_index}, {"inputs", r.inputs}, {"residual", r.residual},
           {"passed", r.passed},         {"resampled", r.resampled}};
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Json report_to_json(const VerificationReport& report, bool include_timing) {
  const CheckConfig& c = report.config;
  Json tolerances = Json::object();
  for (const auto& [name, value] : c.tolerances) tolerances[name] = value;
  Json config{{"n_range", Json::array({c.n_min, c.n_max})},
              {"samples_per_check", c.samples_per_check},
              {"q_list", c.q_list},
              {"seed", c.seed},
              {"tolerances", tolerances},
              {"checks", c.checks},
              {"precision", c.precision ? to_string(*c.precision) : "default"}};

  Json checks = Json::array();
  for (const auto& s : report.checks) {
    Json failures = Json::array();
    for (const auto& f : s.failures) failures.push_back(record_json(f));
    checks.push_back(Json{{"name", s.name},
                          {"n", s.n},
                          {"q", s.q},
                          {"precision", to_string(s.precision)},
                          {"tolerance", s.tolerance},
                          {"count", s.count},
                          {"passed", s.passed},
                          {"max_residual", s.max_residual},
                          {"median_residual", s.median_residual},
                          {"resampled", s.resampled},
                          {"failures", failures}});
  }
  Json skipped = Json::array();
  for (const auto& s : report.skipped) {
    skipped.push_back(Json{{"name", s.name}, {"n", s.n}, {"q", s.q}, {"reason", s.reason}});
  }
  Json meta{{"seed", c.seed}, {"version", kVersion}, {"failures", report.failure_count()}};
  if (include_timing) {
    meta["wall_time_s"] = report.wall_time_s;
    Json per_check = Json::object();
    for (const auto& [name, t] : report.check_time_s) per_check[name] = t;
    meta["check_time_s"] = per_check;
  }
  return Json{{"config", config}, {"checks", checks}, {"skipped", skipped}, {"meta", meta}};
}

std::string report_to_csv(const VerificationReport& report) {
  std::ostringstream out;
  out << "check,n,q,sample_index,residual,tolerance,passed,resampled,inputs,note\r\n";
  for (const auto& r : report.records) {
    out << csv_field(r.check_name) << ',' << r.n << ',' << format_double(r.q) << ','
        << r.sample_index << ',' << format_double(r.residual) << ','
        << format_double(tolerance(report.config, r.check_name, r.n)) << ','
        << (r.passed ? "true" : "false") << ',' << r.resampled << ','
        << csv_field(r.inputs.dump()) << ',' << csv_field(r.note) << "\r\n";
  }
  return out.str();
}

}  // namespace thetadet
