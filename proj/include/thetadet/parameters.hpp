#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <string>

#include "thetadet/errors.hpp"
#include "thetadet/theta.hpp"

namespace thetadet {

/// Minimum distance of every singular combination from the lattice.
inline constexpr double kDeltaMin = 0.05;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

/// Spectral vectors z, w (same length N >= 1) and the dynamical parameter h.
template <typename Scalar = double>
struct ParameterSet {
  ComplexVector<Scalar> z;
  ComplexVector<Scalar> w;
  Complex<Scalar> h{};

  ParameterSet() = default;
  ParameterSet(ComplexVector<Scalar> z_, ComplexVector<Scalar> w_, Complex<Scalar> h_)
      : z(std::move(z_)), w(std::move(w_)), h(h_) {
    if (z.size() < 1 || z.size() != w.size()) {
      throw DimensionError("z and w must have the same length N >= 1");
    }
    using std::isfinite;
    if (!z.allFinite() || !w.allFinite() || !isfinite(h.real()) || !isfinite(h.imag())) {
      throw DomainError("parameter set has non-finite coordinates");
    }
  }

  int n() const noexcept { return static_cast<int>(z.size()); }
};

/// Distance of x to Z + tau Z measured as max(|a - round a|, |b - round b|)
/// for x = a + b tau.
template <typename Scalar>
Scalar lattice_distance(const Complex<Scalar>& x, Scalar tau_im) {
  using std::abs;
  using std::round;
  const Scalar a = x.real();
  const Scalar b = x.imag() / tau_im;
  return std::max(abs(a - round(a)), abs(b - round(b)));
}

namespace detail {

/// "h", "h + 1/2", "h - 3/2", ... for an offset of `halves` / 2.
inline std::string h_shift_name(int halves) {
  if (halves == 0) return "h";
  const int mag = halves < 0 ? -halves : halves;
  std::string out = halves < 0 ? "h - " : "h + ";
  out += (mag % 2 == 0) ? std::to_string(mag / 2) : std::to_string(mag) + "/2";
  return out;
}

inline std::string indexed(const char* var, int one_based) {
  return std::string(var) + "_" + std::to_string(one_based);
}

}  // namespace detail

/// First combination whose lattice distance is below `delta`, or nullopt.
/// Checked: z_j - z_k and z_j + z_k (j < k), w_k - w_j (j < k), h - N/2,
/// h + (N+1)/2 - j for j = 1..N, and h.
template <typename Scalar>
std::optional<std::string> singular_combination(const ParameterSet<Scalar>& ps,
                                                const NomeContext<Scalar>& ctx,
                                                Scalar delta = Scalar(kDeltaMin)) {
  const int n = ps.n();
  const Scalar tau_im = ctx.tau_im();
  auto near = [&](const Complex<Scalar>& x) { return lattice_distance(x, tau_im) < delta; };

  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      if (near(ps.z(j) - ps.z(k)))
        return detail::indexed("z", j + 1) + " - " + detail::indexed("z", k + 1);
      if (near(ps.z(j) + ps.z(k)))
        return detail::indexed("z", j + 1) + " + " + detail::indexed("z", k + 1);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      if (near(ps.w(k) - ps.w(j)))
        return detail::indexed("w", k + 1) + " - " + detail::indexed("w", j + 1);
    }
  }
  if (near(ps.h - Scalar(n) / 2)) return detail::h_shift_name(-n);
  for (int j = 1; j <= n; ++j) {
    const int halves = n + 1 - 2 * j;
    if (near(ps.h + Scalar(halves) / 2)) return detail::h_shift_name(halves);
  }
  if (near(ps.h)) return detail::h_shift_name(0);
  return std::nullopt;
}

/// Throws DomainError if a coordinate leaves the theta strip and
/// SingularityError naming the first combination closer than `delta` to the
/// lattice.
template <typename Scalar>
void validate_parameters(const ParameterSet<Scalar>& ps, const NomeContext<Scalar>& ctx,
                         Scalar delta = Scalar(kDeltaMin)) {
  auto check = [&](const Complex<Scalar>& x, const std::string& name) {
    if (!ctx.in_strip(x)) throw DomainError(name + " outside the theta strip");
  };
  for (int j = 0; j < ps.n(); ++j) {
    check(ps.z(j), detail::indexed("z", j + 1));
    check(ps.w(j), detail::indexed("w", j + 1));
  }
  check(ps.h, "h");
  if (auto bad = singular_combination(ps, ctx, delta)) throw SingularityError(*bad);
}

}  // namespace thetadet
