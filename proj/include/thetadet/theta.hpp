#pragma once

// Odd theta function [u] = H(pi i u) with
//
//   H(u) = 2 sinh(u) prod_{j>=1} (1 - 2 q^{2j} cosh(2u) + q^{4j}) (1 - q^{2j}),
//
// i.e. [u] = 2i sin(pi u) prod_j (1 - 2 q^{2j} cos(2 pi u) + q^{4j}) (1 - q^{2j}).
// It vanishes on the lattice Z + tau Z, tau = -i log(q) / pi, and satisfies
//
//   [u + 1]   = -[u],
//   [u + tau] = -q^{-1} exp(-2 pi i u) [u].

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>

#include "thetadet/errors.hpp"

namespace thetadet {

template <typename Scalar>
using Complex = std::complex<Scalar>;

/// Universal floor for normalizing scales.
inline constexpr double kTiny = 1e-300;

/// Evaluation environment for every theta call. Immutable once built.
template <typename Scalar = double>
class NomeContext {
 public:
  static constexpr Scalar kMaxNome = Scalar(0.95);
  /// 1e-18 for double; about a hundredth of machine epsilon for wider scalars.
  static constexpr Scalar kDefaultEps = Scalar(
      std::min(1e-18, static_cast<double>(std::numeric_limits<Scalar>::epsilon()) * 1e-2));
  static constexpr int kDefaultMaxTerms = 10000;

  /// Half-width of the admissible real range of a theta argument.
  static constexpr Scalar kMaxRe = Scalar(4);

  explicit NomeContext(Scalar q, Scalar truncation_eps = kDefaultEps,
                       int max_terms = kDefaultMaxTerms)
      : q_(q), truncation_eps_(truncation_eps), max_terms_(max_terms) {
    if (!(q > 0) || !(q <= kMaxNome)) {
      throw InvalidContext("nome q must lie in (0, 0.95]");
    }
    if (!(truncation_eps > 0) || !(truncation_eps < 1)) {
      throw InvalidContext("truncation_eps must lie in (0, 1)");
    }
    if (max_terms < 1) {
      throw InvalidContext("max_terms must be positive");
    }
    using std::log;
    log_q_ = log(q_);
    tau_im_ = -log_q_ / std::numbers::pi_v<Scalar>;
    base_terms_ = terms_for_magnification(Scalar(0));
    if (base_terms_ > max_terms_) {
      throw InvalidContext("truncation_eps unreachable within max_terms");
    }
  }

  Scalar q() const noexcept { return q_; }
  Scalar log_q() const noexcept { return log_q_; }
  Scalar tau_im() const noexcept { return tau_im_; }
  Complex<Scalar> tau() const noexcept { return {Scalar(0), tau_im_}; }
  Scalar truncation_eps() const noexcept { return truncation_eps_; }
  int max_terms() const noexcept { return max_terms_; }

  /// Smallest J with q^{2J} < truncation_eps.
  int truncation_index() const noexcept { return base_terms_; }

  /// Product length for an argument with imaginary part `im`: the j-th factor
  /// deviates from 1 by at most ~q^{2j} exp(2 pi |im|), so J is extended
  /// until that bound drops below truncation_eps. Never below
  /// truncation_index(), never above max_terms().
  int product_terms(Scalar im) const noexcept {
    using std::abs;
    const Scalar mag = 2 * std::numbers::pi_v<Scalar> * abs(im);
    return std::clamp(terms_for_magnification(mag), base_terms_, max_terms_);
  }

  /// Range policy: |Re u| <= 4 and |Im u| <= 2 tau_im.
  bool in_strip(const Complex<Scalar>& u) const noexcept {
    using std::abs;
    using std::isfinite;
    const Scalar slack = Scalar(1) + Scalar(1e-12);
    return isfinite(u.real()) && isfinite(u.imag()) && abs(u.real()) <= kMaxRe * slack &&
           abs(u.imag()) <= 2 * tau_im_ * slack;
  }

 private:
  int terms_for_magnification(Scalar log_mag) const noexcept {
    // 2 J log q + log_mag < log eps
    using std::floor;
    using std::log;
    const Scalar bound = (log(truncation_eps_) - log_mag) / (2 * log_q_);
    const Scalar j = floor(bound) + 1;
    if (!(j < Scalar(max_terms_))) return max_terms_ + 1;
    return std::max(1, static_cast<int>(j));
  }

  Scalar q_;
  Scalar truncation_eps_;
  int max_terms_;
  Scalar log_q_{};
  Scalar tau_im_{};
  int base_terms_{};
};

namespace detail {

template <typename Scalar>
void require_strip(const Complex<Scalar>& u, const NomeContext<Scalar>& ctx) {
  if (!ctx.in_strip(u)) {
    throw DomainError("theta argument outside |Re u| <= 4, |Im u| <= 2 tau_im");
  }
}

}  // namespace detail

/// Product form of [u]. Throws DomainError outside the strip policy.
template <typename Scalar>
Complex<Scalar> theta(const Complex<Scalar>& u, const NomeContext<Scalar>& ctx) {
  detail::require_strip(u, ctx);
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  // u = k + r with r exact, so pi * r carries no rounding from the integer
  // part; [k + r] = (-1)^k [r].
  using std::round;
  const Scalar k = round(u.real());
  const Complex<Scalar> r(u.real() - k, u.imag());
  const bool odd = static_cast<long long>(static_cast<double>(k)) % 2 != 0;
  const Complex<Scalar> c2 = std::cos(Scalar(2) * pi * r);
  const Scalar q2 = ctx.q() * ctx.q();
  const int terms = ctx.product_terms(u.imag());

  Complex<Scalar> prod{1};
  Scalar p = q2;  // q^{2j}
  for (int j = 1; j <= terms; ++j) {
    prod *= (Complex<Scalar>(1 + p * p) - Scalar(2) * p * c2) * (1 - p);
    p *= q2;
  }
  const Complex<Scalar> value = Complex<Scalar>(0, 2) * std::sin(pi * r) * prod;
  return odd ? -value : value;
}

/// [u] after pulling Re u back into [-1/2, 1/2] with [u + 1] = -[u] when it
/// falls outside the strip's real range. The imaginary range is still
/// enforced.
template <typename Scalar>
Complex<Scalar> theta_reduced(const Complex<Scalar>& u,
                              const NomeContext<Scalar>& ctx) {
  using std::abs;
  using std::isfinite;
  using std::round;
  if (!isfinite(u.real()) || abs(u.real()) <= NomeContext<Scalar>::kMaxRe) return theta(u, ctx);
  const Scalar shift = round(u.real());
  const Complex<Scalar> value = theta(Complex<Scalar>(u.real() - shift, u.imag()), ctx);
  const auto whole = static_cast<long long>(static_cast<double>(shift));
  return whole % 2 == 0 ? value : -value;
}

/// Independent evaluation of [u] from the Fourier series of theta_1:
///   [u] = i q^{-1/4} theta_1(pi u; q)
///       = 2i sum_{n>=0} (-1)^n q^{n(n+1)} sin((2n+1) pi u).
/// Summation stops once q^{(n+1/2)^2} cosh((2n+1) pi Im u) has fallen below
/// truncation_eps and is decreasing.
template <typename Scalar>
Complex<Scalar> theta_series_oracle(const Complex<Scalar>& u,
                                    const NomeContext<Scalar>& ctx) {
  detail::require_strip(u, ctx);
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar q = ctx.q();
  using std::abs;
  using std::log;
  using std::pow;
  using std::round;
  const Scalar y = abs(u.imag());
  const Scalar log_eps = log(ctx.truncation_eps());
  // Every term has odd frequency, so [k + r] = (-1)^k [r] termwise.
  const Scalar k = round(u.real());
  const Complex<Scalar> r(u.real() - k, u.imag());
  const bool odd = static_cast<long long>(static_cast<double>(k)) % 2 != 0;

  Complex<Scalar> sum{0};
  Scalar prev_bound = 0;
  for (int n = 0; n <= ctx.max_terms(); ++n) {
    const Scalar half = Scalar(n) + Scalar(0.5);
    const Scalar log_bound = half * half * ctx.log_q() + (2 * n + 1) * pi * y;
    const Scalar coeff = pow(q, Scalar(n) * Scalar(n + 1));
    const Complex<Scalar> term = coeff * std::sin(Scalar(2 * n + 1) * pi * r);
    sum += (n % 2 == 0) ? term : -term;
    if (n > 0 && log_bound < log_eps && log_bound < prev_bound) break;
    prev_bound = log_bound;
  }
  return Complex<Scalar>(0, 2) * (odd ? -sum : sum);
}

/// |a - b| / (|a| + |b| + tiny).
template <typename Scalar>
Scalar symmetric_residual(const Complex<Scalar>& a, const Complex<Scalar>& b) {
  using std::abs;
  return abs(a - b) / (abs(a) + abs(b) + Scalar(kTiny));
}

/// Relative residuals of [u+1] = -[u] and [u+tau] = -q^{-1} e^{-2 pi i u} [u],
/// both normalized by |[u]|.
template <typename Scalar>
std::pair<Scalar, Scalar> quasi_period_residuals(const Complex<Scalar>& u,
                                                 const NomeContext<Scalar>& ctx) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  using std::abs;
  const Complex<Scalar> base = theta(u, ctx);
  const Scalar scale = abs(base);
  if (scale < Scalar(kTiny)) {
    throw DegenerateScale("quasi-period check at a lattice zero of [u]");
  }
  const Complex<Scalar> shifted_one = theta(u + Scalar(1), ctx);
  const Complex<Scalar> shifted_tau = theta(u + ctx.tau(), ctx);
  const Complex<Scalar> multiplier =
      std::exp(Complex<Scalar>(0, -2) * pi * u) / ctx.q();
  return {abs(shifted_one + base) / scale, abs(shifted_tau + multiplier * base) / scale};
}

/// |[u+1/2] - [-u+1/2]| / max(|[u+1/2]|, tiny).
template <typename Scalar>
Scalar half_period_residual(const Complex<Scalar>& u, const NomeContext<Scalar>& ctx) {
  using std::abs;
  const Complex<Scalar> lhs = theta(u + Scalar(0.5), ctx);
  const Complex<Scalar> rhs = theta(-u + Scalar(0.5), ctx);
  return abs(lhs - rhs) / std::max(abs(lhs), Scalar(kTiny));
}

/// Three-term addition formula
///   [u+x][u-x][v+y][v-y] - [v+x][v-x][u+y][u-y] - [x+y][x-y][u+v][u-v] = 0,
/// as |T1 - T2 - T3| / (|T1| + |T2| + |T3| + tiny).
template <typename Scalar>
Scalar addition_formula_residual(const Complex<Scalar>& u, const Complex<Scalar>& v,
                                 const Complex<Scalar>& x, const Complex<Scalar>& y,
                                 const NomeContext<Scalar>& ctx) {
  using std::abs;
  auto th = [&ctx](const Complex<Scalar>& a) { return theta(a, ctx); };
  const Complex<Scalar> t1 = th(u + x) * th(u - x) * th(v + y) * th(v - y);
  const Complex<Scalar> t2 = th(v + x) * th(v - x) * th(u + y) * th(u - y);
  const Complex<Scalar> t3 = th(x + y) * th(x - y) * th(u + v) * th(u - v);
  return abs(t1 - t2 - t3) / (abs(t1) + abs(t2) + abs(t3) + Scalar(kTiny));
}

}  // namespace thetadet
