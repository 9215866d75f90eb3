#pragma once

// Unevaluated sum of two doubles (hi + lo, |lo| <= ulp(hi) / 2), giving about
// 32 significant digits. Arithmetic follows the error-free transformations of
// Dekker and Knuth; the elementary functions are argument reduction plus
// Taylor series, refined to full double-double accuracy.
//
// The math functions live in namespace thetadet and are found by ADL, so
// generic code should call them unqualified after `using std::sin;` etc.
// std::complex<DoubleDouble> works through libstdc++'s generic complex
// templates, which make the same unqualified calls.

#include <Eigen/Core>

#include <cmath>
#include <compare>
#include <limits>
#include <numbers>
#include <ostream>

namespace thetadet {

class DoubleDouble {
 public:
  constexpr DoubleDouble() noexcept = default;
  constexpr DoubleDouble(double hi) noexcept : hi_(hi) {}  // NOLINT: implicit by design of a scalar
  constexpr DoubleDouble(double hi, double lo) noexcept : hi_(hi), lo_(lo) {}

  constexpr double hi() const noexcept { return hi_; }
  constexpr double lo() const noexcept { return lo_; }
  explicit constexpr operator double() const noexcept { return hi_ + lo_; }
  explicit operator long double() const noexcept {
    return static_cast<long double>(hi_) + static_cast<long double>(lo_);
  }
  explicit constexpr operator int() const noexcept { return static_cast<int>(hi_); }

  friend constexpr DoubleDouble operator-(const DoubleDouble& a) noexcept {
    return {-a.hi_, -a.lo_};
  }
  friend DoubleDouble operator+(const DoubleDouble& a, const DoubleDouble& b) noexcept;
  friend DoubleDouble operator*(const DoubleDouble& a, const DoubleDouble& b) noexcept;
  friend DoubleDouble operator/(const DoubleDouble& a, const DoubleDouble& b) noexcept;
  friend DoubleDouble operator-(const DoubleDouble& a, const DoubleDouble& b) noexcept {
    return a + (-b);
  }

  DoubleDouble& operator+=(const DoubleDouble& b) noexcept { return *this = *this + b; }
  DoubleDouble& operator-=(const DoubleDouble& b) noexcept { return *this = *this - b; }
  DoubleDouble& operator*=(const DoubleDouble& b) noexcept { return *this = *this * b; }
  DoubleDouble& operator/=(const DoubleDouble& b) noexcept { return *this = *this / b; }

  friend constexpr bool operator==(const DoubleDouble& a, const DoubleDouble& b) noexcept {
    return a.hi_ == b.hi_ && a.lo_ == b.lo_;
  }
  friend constexpr std::partial_ordering operator<=>(const DoubleDouble& a,
                                                     const DoubleDouble& b) noexcept {
    if (auto c = a.hi_ <=> b.hi_; c != 0) return c;
    return a.lo_ <=> b.lo_;
  }

  friend std::ostream& operator<<(std::ostream& os, const DoubleDouble& a) {
    return os << a.hi_ << (a.lo_ < 0 ? " - " : " + ") << std::abs(a.lo_);
  }

 private:
  double hi_ = 0.0;
  double lo_ = 0.0;
};

namespace dd_detail {

inline DoubleDouble quick_two_sum(double a, double b) noexcept {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble two_sum(double a, double b) noexcept {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DoubleDouble two_prod(double a, double b) noexcept {
  const double p = a * b;
#ifdef __FMA__
  return {p, std::fma(a, b, -p)};
#else
  constexpr double split = 134217729.0;  // 2^27 + 1
  const double ta = split * a, tb = split * b;
  const double ahi = ta - (ta - a), alo = a - ahi;
  const double bhi = tb - (tb - b), blo = b - bhi;
  return {p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo};
#endif
}

inline constexpr DoubleDouble kLn2{6.931471805599452862e-01, 2.319046813846299558e-17};
inline constexpr DoubleDouble kPi{3.141592653589793116e+00, 1.224646799147353207e-16};
inline constexpr DoubleDouble kHalfPi{1.570796326794896558e+00, 6.123233995736766036e-17};

}  // namespace dd_detail

inline DoubleDouble operator+(const DoubleDouble& a, const DoubleDouble& b) noexcept {
  using namespace dd_detail;
  DoubleDouble s = two_sum(a.hi_, b.hi_);
  const DoubleDouble t = two_sum(a.lo_, b.lo_);
  s = quick_two_sum(s.hi(), s.lo() + t.hi());
  return quick_two_sum(s.hi(), s.lo() + t.lo());
}

inline DoubleDouble operator*(const DoubleDouble& a, const DoubleDouble& b) noexcept {
  using namespace dd_detail;
  const DoubleDouble p = two_prod(a.hi_, b.hi_);
  return quick_two_sum(p.hi(), p.lo() + (a.hi_ * b.lo_ + a.lo_ * b.hi_));
}

inline DoubleDouble operator/(const DoubleDouble& a, const DoubleDouble& b) noexcept {
  using namespace dd_detail;
  const double q1 = a.hi_ / b.hi_;
  DoubleDouble r = a - DoubleDouble(q1) * b;
  const double q2 = r.hi() / b.hi_;
  r -= DoubleDouble(q2) * b;
  const double q3 = r.hi() / b.hi_;
  return quick_two_sum(q1, q2) + DoubleDouble(q3);
}

inline bool isfinite(const DoubleDouble& a) noexcept { return std::isfinite(a.hi()); }
inline bool isnan(const DoubleDouble& a) noexcept { return std::isnan(a.hi()); }
inline bool isinf(const DoubleDouble& a) noexcept { return std::isinf(a.hi()); }

inline DoubleDouble abs(const DoubleDouble& a) noexcept { return a.hi() < 0 ? -a : a; }
inline DoubleDouble fabs(const DoubleDouble& a) noexcept { return abs(a); }

inline DoubleDouble ldexp(const DoubleDouble& a, int e) noexcept {
  return {std::ldexp(a.hi(), e), std::ldexp(a.lo(), e)};
}

inline DoubleDouble floor(const DoubleDouble& a) noexcept {
  const double hi = std::floor(a.hi());
  if (hi != a.hi()) return {hi, 0.0};
  return dd_detail::quick_two_sum(hi, std::floor(a.lo()));
}

inline DoubleDouble ceil(const DoubleDouble& a) noexcept { return -floor(-a); }

/// Halves round away from zero, as std::round.
inline DoubleDouble round(const DoubleDouble& a) noexcept {
  return a.hi() < 0 ? -floor(-a + DoubleDouble(0.5)) : floor(a + DoubleDouble(0.5));
}

inline DoubleDouble sqrt(const DoubleDouble& a) noexcept {
  if (a.hi() <= 0) return a.hi() == 0 ? DoubleDouble(0.0) : DoubleDouble(std::nan(""));
  const double x = 1.0 / std::sqrt(a.hi());
  const double ax = a.hi() * x;
  const DoubleDouble ax2 = dd_detail::two_prod(ax, ax);
  return DoubleDouble(ax) + DoubleDouble((a - ax2).hi() * (x * 0.5));
}

inline DoubleDouble exp(const DoubleDouble& a) noexcept {
  if (a.hi() <= -709.0) return 0.0;
  if (a.hi() >= 709.0) return std::numeric_limits<double>::infinity();
  if (a.hi() == 0.0) return 1.0;
  constexpr int kSquarings = 9;
  const double m = std::floor(a.hi() / dd_detail::kLn2.hi() + 0.5);
  const DoubleDouble r = ldexp(a - dd_detail::kLn2 * DoubleDouble(m), -kSquarings);

  // expm1(r) by Taylor series, |r| < 2^-10
  DoubleDouble sum = r;
  DoubleDouble term = r;
  for (int i = 2; i < 30; ++i) {
    term = term * r / DoubleDouble(static_cast<double>(i));
    sum += term;
    if (std::abs(term.hi()) < 1e-36) break;
  }
  // (1 + s)^2 - 1 = 2 s + s^2
  for (int i = 0; i < kSquarings; ++i) sum = ldexp(sum, 1) + sum * sum;
  return ldexp(sum + DoubleDouble(1.0), static_cast<int>(m));
}

inline DoubleDouble log(const DoubleDouble& a) noexcept {
  if (a.hi() <= 0) return a.hi() == 0 ? -std::numeric_limits<double>::infinity() : std::nan("");
  // One Newton step on exp(x) = a doubles the digits of the double estimate.
  const DoubleDouble x = std::log(a.hi());
  return x + a * exp(-x) - DoubleDouble(1.0);
}

namespace dd_detail {

struct SinCos {
  DoubleDouble sin;
  DoubleDouble cos;
};

/// Taylor series for |r| <= pi/4.
inline SinCos sincos_reduced(const DoubleDouble& r) noexcept {
  const DoubleDouble r2 = r * r;
  DoubleDouble s = r, c = 1.0;
  DoubleDouble ts = r, tc = 1.0;
  for (int i = 1; i < 30; ++i) {
    ts = -ts * r2 / DoubleDouble(static_cast<double>((2 * i) * (2 * i + 1)));
    tc = -tc * r2 / DoubleDouble(static_cast<double>((2 * i - 1) * (2 * i)));
    s += ts;
    c += tc;
    if (std::abs(ts.hi()) < 1e-36 && std::abs(tc.hi()) < 1e-36) break;
  }
  return {s, c};
}

inline SinCos sincos(const DoubleDouble& a) noexcept {
  const double k = std::round(a.hi() / kHalfPi.hi());
  const DoubleDouble r = a - kHalfPi * DoubleDouble(k);
  const SinCos base = sincos_reduced(r);
  switch (static_cast<long long>(std::fmod(k, 4.0) + 4.0) % 4) {
    case 0: return base;
    case 1: return {base.cos, -base.sin};
    case 2: return {-base.sin, -base.cos};
    default: return {-base.cos, base.sin};
  }
}

}  // namespace dd_detail

inline DoubleDouble sin(const DoubleDouble& a) noexcept { return dd_detail::sincos(a).sin; }
inline DoubleDouble cos(const DoubleDouble& a) noexcept { return dd_detail::sincos(a).cos; }

inline DoubleDouble sinh(const DoubleDouble& a) noexcept {
  if (std::abs(a.hi()) < 0.05) {
    const DoubleDouble a2 = a * a;
    DoubleDouble sum = a, term = a;
    for (int i = 1; i < 20; ++i) {
      term = term * a2 / DoubleDouble(static_cast<double>((2 * i) * (2 * i + 1)));
      sum += term;
      if (std::abs(term.hi()) < 1e-36) break;
    }
    return sum;
  }
  const DoubleDouble e = exp(a);
  return ldexp(e - DoubleDouble(1.0) / e, -1);
}

inline DoubleDouble cosh(const DoubleDouble& a) noexcept {
  const DoubleDouble e = exp(a);
  return ldexp(e + DoubleDouble(1.0) / e, -1);
}

inline DoubleDouble pow(const DoubleDouble& base, const DoubleDouble& e) noexcept {
  if (base.hi() == 0) return e.hi() == 0 ? DoubleDouble(1.0) : DoubleDouble(0.0);
  return exp(e * log(base));
}

inline DoubleDouble fmod(const DoubleDouble& a, const DoubleDouble& b) noexcept {
  const DoubleDouble q = a / b;
  const DoubleDouble t = q.hi() < 0 ? -floor(-q) : floor(q);
  return a - t * b;
}

}  // namespace thetadet

template <>
class std::numeric_limits<thetadet::DoubleDouble> {
 public:
  using T = thetadet::DoubleDouble;
  static constexpr bool is_specialized = true;
  static constexpr bool is_signed = true;
  static constexpr bool is_integer = false;
  static constexpr bool is_exact = false;
  static constexpr bool has_infinity = true;
  static constexpr bool has_quiet_NaN = true;
  static constexpr int digits = 104;
  static constexpr int digits10 = 31;
  static constexpr int max_digits10 = 33;
  static constexpr int radix = 2;
  static constexpr T epsilon() noexcept { return 4.93038065763132e-32; }  // 2^-104
  static constexpr T min() noexcept { return 2.0041683600089728e-292; }
  static constexpr T max() noexcept { return {1.79769313486231570815e+308, 9.97920154767359795037e+291}; }
  static constexpr T lowest() noexcept { return -max(); }
  static constexpr T infinity() noexcept { return std::numeric_limits<double>::infinity(); }
  static constexpr T quiet_NaN() noexcept { return std::numeric_limits<double>::quiet_NaN(); }
  static constexpr T round_error() noexcept { return 0.5; }
};

template <>
inline constexpr thetadet::DoubleDouble std::numbers::pi_v<thetadet::DoubleDouble> =
    thetadet::dd_detail::kPi;

namespace Eigen {

template <>
struct NumTraits<thetadet::DoubleDouble> : GenericNumTraits<thetadet::DoubleDouble> {
  using Real = thetadet::DoubleDouble;
  using NonInteger = thetadet::DoubleDouble;
  using Nested = thetadet::DoubleDouble;
  using Literal = thetadet::DoubleDouble;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 8,
    MulCost = 16
  };
  static Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
  static Real dummy_precision() { return 1e-28; }
  static Real highest() { return std::numeric_limits<Real>::max(); }
  static Real lowest() { return std::numeric_limits<Real>::lowest(); }
  static int digits10() { return std::numeric_limits<Real>::digits10; }
};

}  // namespace Eigen
