#pragma once

// Characterization checks for the z-symmetrized sides L_N and R_N: the
// w_N quasi-periodicity laws, the recursions at w_N = -z_m and w_N = z_m,
// the 1-point initial condition, the recursion of the coefficient of det Y,
// the h-shift identity, and the N = 2 addition-formula ladder. Every check
// returns relative residuals; a forced-zero configuration where both sides
// collapse raises DegenerateScale so the caller can resample.

#include <algorithm>
#include <array>
#include <numbers>
#include <vector>

#include "thetadet/duality.hpp"

namespace thetadet {

enum class Side { L, R };

/// Minus: w_N = -z_m paired with h - 1/2. Plus: w_N = z_m paired with h + 1/2.
enum class Sign { Minus, Plus };

/// Forced-zero threshold: both sides below this fraction of their magnitude
/// proxy counts as degenerate.
inline constexpr double kDegenerateFraction = 1e-12;

namespace detail {

template <typename Scalar>
Complex<Scalar> eval_side(Side side, const ParameterSet<Scalar>& ps,
                          const NomeContext<Scalar>& ctx) {
  return side == Side::L ? eval_L(ps, ctx) : eval_R(ps, ctx);
}

/// |a - b| / (|a| + |b|), or DegenerateScale when |a| + |b| is below
/// kDegenerateFraction * proxy.
template <typename Scalar>
Scalar guarded_residual(const Complex<Scalar>& a, const Complex<Scalar>& b, Scalar proxy,
                        const char* what) {
  using std::abs;
  const Scalar scale = abs(a) + abs(b);
  if (!(scale >= Scalar(kDegenerateFraction) * proxy) || !(scale > Scalar(kTiny))) {
    throw DegenerateScale(std::string(what) + ": both sides vanish");
  }
  return abs(a - b) / scale;
}

template <typename Scalar>
ComplexVector<Scalar> drop(const ComplexVector<Scalar>& v, int one_based) {
  ComplexVector<Scalar> out(v.size() - 1);
  for (Eigen::Index i = 0, o = 0; i < v.size(); ++i) {
    if (i != one_based - 1) out(o++) = v(i);
  }
  return out;
}

}  // namespace detail

/// Residual of the recursion at w_N = -z_m (Sign::Minus) or w_N = z_m
/// (Sign::Plus), m 1-based:
///
///   F_N|_{w_N = -+z_m} = [h][-2z_m] prod_{j!=m} [z_m-z_j+1/2][z_m+z_j]
///       prod_{j<N} [z_m+-w_j+1/2][z_m-+w_j]  F_{N-1}(z without z_m | w_1..w_{N-1} | h-+1/2).
///
/// Both the specialized N-point set and the reduced set are validated.
template <typename Scalar>
Scalar check_recursion(Side side, Sign sign, const ParameterSet<Scalar>& ps, int m,
                       const NomeContext<Scalar>& ctx) {
  using std::abs;
  using detail::at;
  const int n = ps.n();
  if (n < 2) throw DimensionError("recursion needs N >= 2");
  if (m < 1 || m > n) throw DimensionError("recursion index m outside 1..N");
  const auto th = detail::theta_of(ctx);
  const Scalar half(0.5);
  const Complex<Scalar> zm = at(ps.z, m);
  const bool minus = sign == Sign::Minus;

  ParameterSet<Scalar> special = ps;
  special.w(n - 1) = minus ? -zm : zm;
  validate_parameters(special, ctx);
  const ParameterSet<Scalar> reduced(detail::drop(ps.z, m), ps.w.head(n - 1),
                                     minus ? ps.h - half : ps.h + half);
  validate_parameters(reduced, ctx);

  Complex<Scalar> factors = th(ps.h);
  for (int j = 1; j <= n; ++j) {
    if (j == m) continue;
    factors *= th(zm - at(ps.z, j) + half) * th(zm + at(ps.z, j));
  }
  for (int j = 1; j < n; ++j) {
    const Complex<Scalar> wj = at(ps.w, j);
    factors *= minus ? th(zm + wj + half) * th(zm - wj) : th(zm - wj + half) * th(zm + wj);
  }
  const Complex<Scalar> smaller = detail::eval_side(side, reduced, ctx);
  const Complex<Scalar> lhs = detail::eval_side(side, special, ctx);
  const Complex<Scalar> rhs = factors * th(Scalar(-2) * zm) * smaller;
  return detail::guarded_residual(lhs, rhs, abs(factors * smaller), "recursion");
}

/// Residuals of L_1 and R_1 against [h+z+w][w-z] - [h-z+w][w+z].
template <typename Scalar>
std::pair<Scalar, Scalar> check_initial(const Complex<Scalar>& z, const Complex<Scalar>& w,
                                        const Complex<Scalar>& h,
                                        const NomeContext<Scalar>& ctx) {
  const auto th = detail::theta_of(ctx);
  ComplexVector<Scalar> zv(1), wv(1);
  zv(0) = z;
  wv(0) = w;
  const ParameterSet<Scalar> ps(zv, wv, h);
  const Complex<Scalar> closed = th(h + z + w) * th(w - z) - th(h - z + w) * th(w + z);
  return {symmetric_residual(eval_L(ps, ctx), closed),
          symmetric_residual(eval_R(ps, ctx), closed)};
}

/// Residuals of F(w_N + 1) = (-1)^{2N} F and
/// F(w_N + tau) = (-q^{-1})^{2N} exp(-2 pi i (2N w_N + h)) F for F = L_N or R_N.
template <typename Scalar>
std::pair<Scalar, Scalar> check_wN_quasi_periodicity(Side side, const ParameterSet<Scalar>& ps,
                                                     const NomeContext<Scalar>& ctx) {
  using std::abs;
  using std::exp;
  using std::pow;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const int n = ps.n();
  const Complex<Scalar> base = detail::eval_side(side, ps, ctx);

  ParameterSet<Scalar> shifted = ps;
  shifted.w(n - 1) += Scalar(1);
  const Complex<Scalar> by_one = detail::eval_side(side, shifted, ctx);

  shifted.w(n - 1) = ps.w(n - 1) + ctx.tau();
  const Complex<Scalar> by_tau = detail::eval_side(side, shifted, ctx);

  const Complex<Scalar> multiplier =
      pow(ctx.q(), Scalar(-2 * n)) *
      exp(Complex<Scalar>(0, -2) * pi * (Scalar(2 * n) * ps.w(n - 1) + ps.h));
  return {symmetric_residual(by_one, base), symmetric_residual(by_tau, multiplier * base)};
}

/// Residual of the recursion of c_N (the full coefficient of det Y_N in R_N)
/// at w_N = -z_N (Sign::Minus, down to h - 1/2):
///
///   c_N = [h][h+1/2] / ([h-1/2][h+N/2-1/2]) prod_{j<N} [z_N+w_j-1/2] / [z_N+w_j]
///         prod_{j<N} [z_j-z_N+1/2] / [z_j-z_N]  c_{N-1}(... | h-1/2),
///
/// or at w_N = z_N (Sign::Plus, up to h + 1/2):
///
///   c_N = -[h-N/2+1] / [h+1/2] prod_{j<N} [z_N-w_j+1/2] / [z_N-w_j]
///         prod_{j<N} [z_j-z_N+1/2] / [z_j-z_N]  c_{N-1}(... | h+1/2).
template <typename Scalar>
Scalar check_prefactor_recursion(Sign sign, const ParameterSet<Scalar>& ps,
                                 const NomeContext<Scalar>& ctx) {
  using detail::at;
  using detail::nonsingular;
  const int n = ps.n();
  if (n < 2) throw DimensionError("prefactor recursion needs N >= 2");
  const auto th = detail::theta_of(ctx);
  const Scalar half(0.5);
  const Complex<Scalar> zn = at(ps.z, n);
  const Complex<Scalar> h = ps.h;
  const bool minus = sign == Sign::Minus;

  ParameterSet<Scalar> special = ps;
  special.w(n - 1) = minus ? -zn : zn;
  validate_parameters(special, ctx);
  const ParameterSet<Scalar> reduced(ps.z.head(n - 1), ps.w.head(n - 1),
                                     minus ? h - half : h + half);
  validate_parameters(reduced, ctx);

  Complex<Scalar> ratio;
  if (minus) {
    ratio = th(h) * th(h + half) /
            (nonsingular(th(h - half), "h - 1/2") *
             nonsingular(th(h + Scalar(n) / 2 - half), detail::h_shift_name(n - 1)));
  } else {
    ratio = -th(h - Scalar(n) / 2 + Scalar(1)) / nonsingular(th(h + half), "h + 1/2");
  }
  for (int j = 1; j < n; ++j) {
    const Complex<Scalar> wj = at(ps.w, j);
    const Complex<Scalar> d = at(ps.z, j) - zn;
    const std::string dz = detail::indexed("z", j) + " - " + detail::indexed("z", n);
    if (minus) {
      ratio *= th(zn + wj - half) / nonsingular(th(zn + wj), "z_N + w_j");
    } else {
      ratio *= th(zn - wj + half) / nonsingular(th(zn - wj), "z_N - w_j");
    }
    ratio *= th(d + half) / nonsingular(th(d), dz);
  }
  return symmetric_residual(right_coefficient(special, ctx),
                            ratio * right_coefficient(reduced, ctx));
}

/// Residual of [h+(N-1)/2][h-N/2+1] = [h+1/2][h].
template <typename Scalar>
Scalar check_h_shift_identity(const Complex<Scalar>& h, int n, const NomeContext<Scalar>& ctx) {
  using std::abs;
  const auto th = detail::theta_of(ctx);
  const Complex<Scalar> lhs = th(h + Scalar(n - 1) / 2) * th(h - Scalar(n) / 2 + Scalar(1));
  const Complex<Scalar> rhs = th(h + Scalar(0.5)) * th(h);
  if (!(abs(lhs) + abs(rhs) > Scalar(kTiny))) {
    throw DegenerateScale("h-shift identity at a theta zero");
  }
  return symmetric_residual(lhs, rhs);
}

/// The eight N = 2 relations derived from the addition formula, in order:
/// four for det X (two equalities each; the larger residual is reported)
/// followed by four for det Y.
///
/// The det X relations share one pattern in a = +-z_1, b = +-z_2:
///
///   [h-1/2+a+w_1][w_2+a][h+b+w_2][w_1+b+1/2] - [h-1/2+b+w_1][w_2+b][h+a+w_2][w_1+a+1/2]
///   = -[h+1/2+a+w_1][w_2+a][h+b+w_2][w_1+b+1/2] + [h+1/2+b+w_1][w_2+b][h+a+w_2][w_1+a+1/2]
///   = -[h][w_2-w_1+1/2][h+1/2+a+b+w_1+w_2][a-b].
///
/// Each relation P - S = T is scored like the addition formula,
/// |P - S - T| / (|P| + |S| + |T| + tiny), so a relation whose sides both
/// vanish (e.g. z_1 = z_2) is measured against the size of its products.
template <typename Scalar>
std::array<Scalar, 8> check_n2_relations(const ParameterSet<Scalar>& ps,
                                         const NomeContext<Scalar>& ctx) {
  using std::abs;
  if (ps.n() != 2) throw DimensionError("N = 2 relations need N = 2");
  const auto th = detail::theta_of(ctx);
  const Scalar half(0.5);
  const Complex<Scalar> z1 = ps.z(0), z2 = ps.z(1), w1 = ps.w(0), w2 = ps.w(1), h = ps.h;

  auto relation = [](const Complex<Scalar>& p, const Complex<Scalar>& s,
                     const Complex<Scalar>& t) {
    return abs(p - s - t) / (abs(p) + abs(s) + abs(t) + Scalar(kTiny));
  };

  std::array<Scalar, 8> out{};
  const std::array<std::pair<Complex<Scalar>, Complex<Scalar>>, 4> signs{
      {{z1, z2}, {z1, -z2}, {-z1, z2}, {-z1, -z2}}};
  for (int r = 0; r < 4; ++r) {
    const auto [a, b] = signs[r];
    const Complex<Scalar> right =
        -th(h) * th(w2 - w1 + half) * th(h + half + a + b + w1 + w2) * th(a - b);
    auto score = [&](const Complex<Scalar>& shift, const Complex<Scalar>& sign) {
      const Complex<Scalar> p = th(h + shift + a + w1) * th(w2 + a) * th(h + b + w2) *
                                th(w1 + b + half);
      const Complex<Scalar> s = th(h + shift + b + w1) * th(w2 + b) * th(h + a + w2) *
                                th(w1 + a + half);
      return relation(sign * p, sign * s, right);
    };
    out[r] = std::max(score(-half, Scalar(1)), score(half, Scalar(-1)));
  }

  const Complex<Scalar> hh = h + half;
  out[4] = relation(th(hh + w1 + z1) * th(z2 + w1) * th(hh + w2 + z2) * th(z1 + w2),
                    th(hh + w1 + z2) * th(z1 + w1) * th(hh + w2 + z1) * th(z2 + w2),
                    th(hh) * th(z1 - z2) * th(hh + z1 + z2 + w1 + w2) * th(w1 - w2));
  out[5] = relation(th(hh + w1 + z1) * th(z2 - w1) * th(hh + w2 - z2) * th(z1 + w2),
                    th(hh + w2 + z1) * th(z2 - w2) * th(hh + w1 - z2) * th(z1 + w1),
                    th(hh) * th(z1 + z2) * th(hh + z1 - z2 + w1 + w2) * th(w2 - w1));
  out[6] = relation(th(hh + w1 - z1) * th(z2 + w1) * th(hh + w2 + z2) * th(z1 - w2),
                    th(hh + w2 - z1) * th(z2 + w2) * th(hh + w1 + z2) * th(z1 - w1),
                    th(hh) * th(z1 + z2) * th(hh - z1 + z2 + w1 + w2) * th(w1 - w2));
  out[7] = relation(th(hh + w1 - z1) * th(z2 - w1) * th(hh + w2 - z2) * th(z1 - w2),
                    th(hh + w2 - z1) * th(z2 - w2) * th(hh + w1 - z2) * th(z1 - w1),
                    th(hh) * th(z2 - z1) * th(hh - z1 - z2 + w1 + w2) * th(w1 - w2));
  return out;
}

/// Boundedness of R_N near the removable pole of its prefactor at
/// w_N = w_j: max |R_N| on a circle of radius `inner` around w_N = w_j,
/// divided by the median |R_N| on a circle of radius `outer` (0.1, shrunk
/// to tau_im / 4 for large q to stay inside the strip). A genuine pole would
/// make this ratio grow like outer / inner or faster.
template <typename Scalar>
Scalar holomorphy_ratio(const ParameterSet<Scalar>& ps, int j, const NomeContext<Scalar>& ctx,
                        Scalar inner = Scalar(1e-3), int points = 16) {
  using std::abs;
  using std::cos;
  using std::sin;
  const int n = ps.n();
  if (n < 2 || j < 1 || j >= n) throw DimensionError("holomorphy check needs 1 <= j < N");
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar outer = std::min(Scalar(0.1), ctx.tau_im() / 4);
  auto ring = [&](Scalar radius) {
    std::vector<Scalar> mags;
    ParameterSet<Scalar> moved = ps;
    for (int p = 0; p < points; ++p) {
      // Offset by half a step so no point lies on the real axis.
      const Scalar angle = 2 * pi * (Scalar(p) + Scalar(0.5)) / Scalar(points);
      moved.w(n - 1) = ps.w(j - 1) + Complex<Scalar>(radius * cos(angle), radius * sin(angle));
      mags.push_back(abs(eval_R(moved, ctx)));
    }
    return mags;
  };
  const std::vector<Scalar> near = ring(inner);
  std::vector<Scalar> far = ring(outer);
  std::nth_element(far.begin(), far.begin() + far.size() / 2, far.end());
  const Scalar median = far[far.size() / 2];
  if (!(median > Scalar(kTiny))) throw DegenerateScale("R_N vanishes on the outer circle");
  return *std::max_element(near.begin(), near.end()) / median;
}

/// |det Y_N| with w_N forced onto w_j, over the Hadamard bound
/// prod_k ||column k||.
template <typename Scalar>
Scalar det_Y_collision_residual(const ParameterSet<Scalar>& ps, int j,
                                const NomeContext<Scalar>& ctx) {
  using std::abs;
  const int n = ps.n();
  if (n < 2 || j < 1 || j >= n) throw DimensionError("collision check needs 1 <= j < N");
  ParameterSet<Scalar> forced = ps;
  forced.w(n - 1) = ps.w(j - 1);
  const SquareMatrix<Scalar> y = build_Y(forced, ctx);
  Scalar bound(1);
  for (Eigen::Index k = 0; k < y.cols(); ++k) bound *= y.col(k).norm();
  if (!(bound > Scalar(kTiny))) throw DegenerateScale("det Y has a vanishing column");
  return abs(det_lu(y).value) / bound;
}

/// With z_k forced to 0: max |X(., k)| over max |X|, plus |det X| over the
/// Hadamard bound of the remaining columns. Both vanish exactly in exact
/// arithmetic.
template <typename Scalar>
Scalar det_X_zero_column_residual(const ParameterSet<Scalar>& ps, int k,
                                  const NomeContext<Scalar>& ctx) {
  using std::abs;
  const int n = ps.n();
  if (k < 1 || k > n) throw DimensionError("column index outside 1..N");
  ParameterSet<Scalar> forced = ps;
  forced.z(k - 1) = Complex<Scalar>(0);
  const SquareMatrix<Scalar> x = build_X(forced, ctx);
  Scalar bound(1);
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (c != k - 1) bound *= x.col(c).norm();
  }
  const Scalar entry_max = x.cwiseAbs().maxCoeff();
  const Scalar column = x.col(k - 1).cwiseAbs().maxCoeff();
  if (!(entry_max > Scalar(kTiny)) || !(bound > Scalar(kTiny))) {
    return column > Scalar(0) ? Scalar(1) : Scalar(0);
  }
  return std::max(column / entry_max, abs(det_lu(x).value) / bound);
}

}  // namespace thetadet
