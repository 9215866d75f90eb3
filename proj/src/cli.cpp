#include "thetadet/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include "sampling.hpp"
#include "thetadet/double_double.hpp"
#include "thetadet/duality.hpp"
#include "thetadet/errors.hpp"
#include "thetadet/suite.hpp"

namespace thetadet::cli {

namespace {

std::string strip(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

std::vector<std::string> split(const std::string& text, char delim) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == delim) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

std::optional<double> to_double(std::string_view s) {
  if (s.starts_with('+')) s.remove_prefix(1);
  double value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<int> to_int(std::string_view s) {
  int value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

std::complex<double> parse_complex(const std::string& token) {
  const std::string s = strip(token);
  auto fail = [&]() -> ConfigError {
    return ConfigError("cannot parse complex number '" + token + "'");
  };
  if (s.empty()) throw fail();
  if (s.back() != 'i') {
    if (auto re = to_double(s)) return {*re, 0.0};
    throw fail();
  }
  const std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not leading and not an exponent sign.
  std::size_t split_at = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split_at = i;
      break;
    }
  }
  const std::string re_text = split_at == std::string::npos ? "" : body.substr(0, split_at);
  std::string im_text = split_at == std::string::npos ? body : body.substr(split_at);
  if (im_text.empty() || im_text == "+") im_text = "1";
  if (im_text == "-") im_text = "-1";
  const auto im = to_double(im_text);
  const auto re = re_text.empty() ? std::optional<double>(0.0) : to_double(re_text);
  if (!re || !im) throw fail();
  return {*re, *im};
}

std::vector<std::complex<double>> parse_complex_list(const std::string& text) {
  std::vector<std::complex<double>> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_complex(part));
  return out;
}

std::pair<int, int> parse_n_range(const std::string& text) {
  const std::string s = strip(text);
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    if (auto n = to_int(s)) return {*n, *n};
    throw ConfigError("cannot parse N '" + text + "'");
  }
  const auto a = to_int(std::string_view(s).substr(0, dots));
  const auto b = to_int(std::string_view(s).substr(dots + 2));
  if (!a || !b) throw ConfigError("cannot parse N range '" + text + "'");
  return {*a, *b};
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    const auto v = to_double(strip(part));
    if (!v) throw ConfigError("cannot parse real number '" + part + "'");
    out.push_back(*v);
  }
  return out;
}

std::pair<std::string, double> parse_tolerance(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("tolerance must be name=value, got '" + text + "'");
  }
  const std::string name = strip(text.substr(0, eq));
  const auto value = to_double(strip(text.substr(eq + 1)));
  if (name.empty() || !value) throw ConfigError("cannot parse tolerance '" + text + "'");
  return {name, *value};
}

namespace {

struct Options {
  std::string n;
  std::string q;
  int samples = 0;
  std::uint64_t seed = 42;
  std::vector<std::string> tol;
  std::string output;
  std::string format;  // empty: json, or csv for bench
  std::string checks;
  int threads = 1;
  std::string precision;
  std::string z, w, h;
};

struct Defaults {
  std::pair<int, int> n;
  std::vector<double> q;
  int samples;
  std::vector<std::string> checks;
};

CheckConfig resolve(const Options& o, const Defaults& d) {
  CheckConfig c;
  std::tie(c.n_min, c.n_max) = o.n.empty() ? d.n : parse_n_range(o.n);
  c.q_list = o.q.empty() ? d.q : parse_real_list(o.q);
  c.samples_per_check = o.samples == 0 ? d.samples : o.samples;
  c.seed = o.seed;
  for (const auto& t : o.tol) {
    const auto [name, value] = parse_tolerance(t);
    c.tolerances[name] = value;
  }
  if (o.checks.empty()) {
    c.checks = d.checks;
  } else {
    for (const auto& name : split(o.checks, ',')) c.checks.push_back(strip(name));
  }
  if (!o.precision.empty()) c.precision = parse_precision(o.precision);
  c.threads = o.threads;
  c.validate();
  return c;
}

/// Writes to --output or `out`.
void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.output.empty() || o.output == "-") {
    out << text;
    return;
  }
  std::ofstream file(o.output, std::ios::binary);
  if (!file) throw ConfigError("cannot open output file '" + o.output + "'");
  file << text;
  if (!file) throw ConfigError("failed writing output file '" + o.output + "'");
}

void require_format(Options& o, const char* fallback) {
  if (o.format.empty()) o.format = fallback;
  if (o.format != "json" && o.format != "csv") {
    throw ConfigError("format must be json or csv, got '" + o.format + "'");
  }
}

int cmd_suite(Options o, const Defaults& d, std::ostream& out, std::ostream& err) {
  require_format(o, "json");
  const CheckConfig config = resolve(o, d);
  const VerificationReport report = run_suite(config);
  emit(o, out,
       o.format == "json" ? report_to_json(report).dump(2) + "\n" : report_to_csv(report));
  const int failures = report.failure_count();
  if (failures > 0) {
    err << failures << " sample(s) failed\n";
    return kExitFailure;
  }
  return kExitOk;
}

Json complex_json(const std::complex<double>& c) { return Json::array({c.real(), c.imag()}); }

template <typename Scalar>
Json evaluate_point(const ParameterSet<double>& base, double q) {
  const NomeContext<Scalar> ctx{Scalar(q)};
  ComplexVector<Scalar> z(base.n()), w(base.n());
  for (int i = 0; i < base.n(); ++i) {
    z(i) = {Scalar(base.z(i).real()), Scalar(base.z(i).imag())};
    w(i) = {Scalar(base.w(i).real()), Scalar(base.w(i).imag())};
  }
  const ParameterSet<Scalar> ps(z, w, {Scalar(base.h.real()), Scalar(base.h.imag())});
  validate_parameters(ps, ctx);
  auto narrow = [](const std::complex<Scalar>& c) {
    return std::complex<double>(static_cast<double>(c.real()), static_cast<double>(c.imag()));
  };
  const DualityEvaluation<Scalar> ev = identity_residual(ps, ctx);
  return Json{{"lhs", complex_json(narrow(ev.lhs))},
              {"rhs", complex_json(narrow(ev.rhs))},
              {"residual", static_cast<double>(ev.residual)},
              {"det_x", complex_json(narrow(det_lu(build_X(ps, ctx)).value))},
              {"det_y", complex_json(narrow(det_lu(build_Y(ps, ctx)).value))},
              {"prefactor", complex_json(narrow(prefactor(ps, ctx)))}};
}

int cmd_eval(const Options& o, std::ostream& out) {
  if (o.z.empty() || o.w.empty() || o.h.empty()) throw ConfigError("eval needs --z, --w and --h");
  const std::vector<double> qs = o.q.empty() ? std::vector<double>{} : parse_real_list(o.q);
  if (qs.size() != 1) throw ConfigError("eval needs exactly one --q value");
  const double q = qs.front();
  if (!(q > 0 && q <= 0.95)) throw ConfigError("q = " + format_double(q) + " outside (0, 0.95]");
  const auto zs = parse_complex_list(o.z);
  const auto ws = parse_complex_list(o.w);
  const auto h = parse_complex(o.h);
  if (zs.size() != ws.size()) throw ConfigError("--z and --w must have the same length");
  if (zs.size() > 8) throw ConfigError("N must not exceed 8");
  ComplexVector<double> z(zs.size()), w(ws.size());
  for (std::size_t i = 0; i < zs.size(); ++i) {
    z(i) = zs[i];
    w(i) = ws[i];
  }
  const ParameterSet<double> ps(z, w, h);
  const Precision precision = o.precision.empty() ? Precision::Double : parse_precision(o.precision);
  Json result{{"n", ps.n()}, {"q", q}, {"precision", to_string(precision)}};
  result.update(precision == Precision::Double ? evaluate_point<double>(ps, q)
                                               : evaluate_point<DoubleDouble>(ps, q));
  emit(o, out, result.dump(2) + "\n");
  return kExitOk;
}

struct Timing {
  std::string operation;
  int n;
  double q;
  double mean_ns;
  double p95_ns;
  int samples;
};

template <typename Scalar>
std::vector<Timing> bench_sizes(const CheckConfig& c) {
  using Clock = std::chrono::steady_clock;
  std::vector<Timing> rows;
  for (double q : c.q_list) {
    const NomeContext<double> dctx(q);
    const NomeContext<Scalar> ctx{Scalar(q)};
    for (int n = c.n_min; n <= c.n_max; ++n) {
      std::vector<std::vector<double>> ns(4);
      for (int i = 0; i < c.samples_per_check; ++i) {
        sampling::Stream s(sampling::stream_seed(c.seed, "bench", n, q, i));
        const ParameterSet<double> base = sampling::parameters(s, n, dctx);
        ComplexVector<Scalar> z(n), w(n);
        for (int k = 0; k < n; ++k) {
          z(k) = {Scalar(base.z(k).real()), Scalar(base.z(k).imag())};
          w(k) = {Scalar(base.w(k).real()), Scalar(base.w(k).imag())};
        }
        const ParameterSet<Scalar> ps(z, w, {Scalar(base.h.real()), Scalar(base.h.imag())});
        volatile double sink = 0;
        auto time = [&](int slot, auto&& fn) {
          const auto t0 = Clock::now();
          sink = sink + fn();
          ns[slot].push_back(std::chrono::duration<double, std::nano>(Clock::now() - t0).count());
        };
        time(0, [&] { return static_cast<double>(theta(ps.h + ps.z(0), ctx).real()); });
        SquareMatrix<Scalar> x;
        time(1, [&] {
          x = build_X(ps, ctx);
          const SquareMatrix<Scalar> y = build_Y(ps, ctx);
          return static_cast<double>(y(0, 0).real());
        });
        time(2, [&] { return static_cast<double>(det_lu(x).value.real()); });
        time(3, [&] { return static_cast<double>(identity_residual(ps, ctx).residual); });
      }
      static const char* names[] = {"theta", "build_matrices", "det_lu", "identity_residual"};
      for (int slot = 0; slot < 4; ++slot) {
        auto& v = ns[slot];
        std::sort(v.begin(), v.end());
        double mean = 0;
        for (double t : v) mean += t;
        mean /= static_cast<double>(v.size());
        const std::size_t rank = (95 * v.size() + 99) / 100;  // nearest rank
        rows.push_back({names[slot], n, q, mean, v[std::max<std::size_t>(rank, 1) - 1],
                        static_cast<int>(v.size())});
      }
    }
  }
  return rows;
}

int cmd_bench(Options o, const Defaults& d, std::ostream& out) {
  require_format(o, "csv");
  const CheckConfig c = resolve(o, d);
  const bool extended = c.precision == Precision::Extended;
  const auto rows = extended ? bench_sizes<DoubleDouble>(c) : bench_sizes<double>(c);
  if (o.format == "json") {
    Json arr = Json::array();
    for (const auto& r : rows) {
      arr.push_back(Json{{"operation", r.operation},
                         {"N", r.n},
                         {"q", r.q},
                         {"mean_ns", r.mean_ns},
                         {"p95_ns", r.p95_ns},
                         {"samples", r.samples}});
    }
    emit(o, out, arr.dump(2) + "\n");
  } else {
    std::string csv = "operation,N,q,mean_ns,p95_ns,samples\r\n";
    for (const auto& r : rows) {
      csv += r.operation + "," + std::to_string(r.n) + "," + format_double(r.q) + "," +
             format_double(r.mean_ns) + "," + format_double(r.p95_ns) + "," +
             std::to_string(r.samples) + "\r\n";
    }
    emit(o, out, csv);
  }
  return kExitOk;
}

int run_unguarded(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Elliptic theta determinant duality: verification suite and evaluator",
               "thetadet"};
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "INI file with key = value lines; z, w, h go under [eval]");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  Options o;
  app.add_option("--n", o.n, "N or inclusive range a..b (1..8)");
  // Config files deliver comma lists as several values; join them back.
  auto list = [](CLI::Option* opt) {
    return opt->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::Join);
  };
  list(app.add_option("--q", o.q, "comma-separated nome values in (0, 0.95]"));
  app.add_option("--samples", o.samples, "samples per (check, N, q)")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "64-bit seed");
  app.add_option("--tol", o.tol, "name=value tolerance override (repeatable)");
  app.add_option("--output", o.output, "output path (default stdout)");
  app.add_option("--format", o.format, "json or csv (bench defaults to csv)");
  list(app.add_option("--checks", o.checks, "comma-separated check names"));
  app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--precision", o.precision, "double or extended (double-double)");

  auto* verify = app.add_subcommand("verify", "run the characterization suite");
  auto* eval = app.add_subcommand("eval", "evaluate both sides at one parameter set");
  auto* xcheck = app.add_subcommand("xcheck", "theta and determinant oracle cross-checks");
  auto* bench = app.add_subcommand("bench", "time theta, matrix build, det and identity");
  eval->set_help_flag("--help", "print this help message and exit");
  list(eval->add_option("--z", o.z, "comma-separated complex z_1..z_N, e.g. 0.1+0.02i"));
  list(eval->add_option("--w", o.w, "comma-separated complex w_1..w_N"));
  eval->add_option("--h", o.h, "complex h");
  for (auto* sub : {verify, eval, xcheck, bench}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (verify->parsed()) {
      return cmd_suite(o, {{1, 4}, {0.3, 0.5}, 50, default_verify_checks()}, out, err);
    }
    if (xcheck->parsed()) {
      return cmd_suite(o, {{1, 4}, {0.05, 0.3, 0.5, 0.8}, 200, xcheck_checks()}, out, err);
    }
    if (bench->parsed()) return cmd_bench(o, {{1, 6}, {0.5}, 100, {"identity"}}, out);
    return cmd_eval(o, out);
  } catch (const SingularityError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return run_unguarded(argc, argv, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace thetadet::cli
