#pragma once

// The two determinant families X_N, Y_N, the prefactor relating their
// determinants, and the z-symmetrized sides
//
//   L_N = prod_{j<k} [z_j - z_k + 1/2] / [z_j - z_k] * det X_N,
//   R_N = prefactor * prod_{j<k} [z_j - z_k + 1/2] / [z_j - z_k] * det Y_N,
//
// which agree identically.
//
// Indexing: every formula below is written with the 1-based j, k, l of the
// displayed products. The only conversion to Eigen's 0-based storage is the
// `at(v, l)` accessor (v(l - 1)) and the `(j - 1, k - 1)` matrix store.

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <vector>

#include "thetadet/determinant.hpp"
#include "thetadet/parameters.hpp"
#include "thetadet/theta.hpp"

namespace thetadet {

template <typename Scalar>
struct DualityEvaluation {
  Complex<Scalar> lhs{};
  Complex<Scalar> rhs{};
  /// |lhs - rhs| / scale
  Scalar residual{};
  /// |lhs| + |rhs| + tiny
  Scalar scale{};
};

namespace detail {

template <typename Scalar>
const Complex<Scalar>& at(const ComplexVector<Scalar>& v, int one_based) {
  return v(one_based - 1);
}

template <typename Scalar>
auto theta_of(const NomeContext<Scalar>& ctx) {
  return [&ctx](const Complex<Scalar>& u) { return theta_reduced(u, ctx); };
}

/// Denominator guard: |value| below 1e3 * tiny counts as a pole.
template <typename Scalar>
const Complex<Scalar>& nonsingular(const Complex<Scalar>& value, const std::string& name) {
  using std::abs;
  if (!(abs(value) >= Scalar(1e3 * kTiny))) throw SingularityError(name);
  return value;
}

}  // namespace detail

/// X_N(j, k) = [h+(j-N)/2+z_k+w_j] prod_{l<j}[w_l+z_k+1/2] prod_{l>j}[w_l+z_k]
///             prod_l [w_l-z_k]  -  (same with z_k -> -z_k).
template <typename Scalar>
SquareMatrix<Scalar> build_X(const ParameterSet<Scalar>& ps, const NomeContext<Scalar>& ctx) {
  using detail::at;
  const auto th = detail::theta_of(ctx);
  const int n = ps.n();
  const Scalar half(0.5);
  SquareMatrix<Scalar> x(n, n);
  std::vector<Complex<Scalar>> plus(n + 1), plus_half(n + 1);

  // Half of an entry, with s = +z_k or s = -z_k.
  auto branch = [&](const Complex<Scalar>& s, int j, const Complex<Scalar>& tail) {
    Complex<Scalar> v = th(ps.h + Scalar(j - n) / 2 + s + at(ps.w, j));
    for (int l = 1; l < j; ++l) v *= plus_half[l];
    for (int l = j + 1; l <= n; ++l) v *= plus[l];
    return v * tail;
  };

  for (int k = 1; k <= n; ++k) {
    const Complex<Scalar> zk = at(ps.z, k);
    std::vector<Complex<Scalar>> first(n + 1);
    for (int sign = 0; sign < 2; ++sign) {
      const Complex<Scalar> s = sign == 0 ? zk : -zk;
      Complex<Scalar> tail{1};
      for (int l = 1; l <= n; ++l) {
        plus[l] = th(at(ps.w, l) + s);
        plus_half[l] = th(at(ps.w, l) + s + half);
        tail *= th(at(ps.w, l) - s);
      }
      for (int j = 1; j <= n; ++j) {
        if (sign == 0) {
          first[j] = branch(s, j, tail);
        } else {
          x(j - 1, k - 1) = first[j] - branch(s, j, tail);
        }
      }
    }
  }
  return x;
}

/// Y_N(j, k) = [h+(N-1)/2+w_k+z_j] prod_{l!=j}[z_l+w_k] prod_l [z_l-w_k]
///           - [-h-(N-1)/2-w_k+z_j] prod_{l!=j}[z_l-w_k] prod_l [z_l+w_k].
template <typename Scalar>
SquareMatrix<Scalar> build_Y(const ParameterSet<Scalar>& ps, const NomeContext<Scalar>& ctx) {
  using detail::at;
  const auto th = detail::theta_of(ctx);
  const int n = ps.n();
  const Scalar shift = Scalar(n - 1) / 2;
  SquareMatrix<Scalar> y(n, n);
  std::vector<Complex<Scalar>> zp(n + 1), zm(n + 1);

  for (int k = 1; k <= n; ++k) {
    const Complex<Scalar> wk = at(ps.w, k);
    Complex<Scalar> all_p{1}, all_m{1};
    for (int l = 1; l <= n; ++l) {
      zp[l] = th(at(ps.z, l) + wk);
      zm[l] = th(at(ps.z, l) - wk);
      all_p *= zp[l];
      all_m *= zm[l];
    }
    for (int j = 1; j <= n; ++j) {
      const Complex<Scalar> zj = at(ps.z, j);
      Complex<Scalar> a = th(ps.h + shift + wk + zj);
      Complex<Scalar> b = th(-ps.h - shift - wk + zj);
      for (int l = 1; l <= n; ++l) {
        if (l == j) continue;
        a *= zp[l];
        b *= zm[l];
      }
      y(j - 1, k - 1) = a * all_m - b * all_p;
    }
  }
  return y;
}

/// [h] prod_{j=1}^N [h-j/2+1] / ([h-N/2] prod_{j=1}^N [h+(N+1)/2-j]).
template <typename Scalar>
Complex<Scalar> prefactor_h_part(const Complex<Scalar>& h, int n,
                                 const NomeContext<Scalar>& ctx) {
  const auto th = detail::theta_of(ctx);
  Complex<Scalar> num = th(h);
  Complex<Scalar> den =
      detail::nonsingular(th(h - Scalar(n) / 2), detail::h_shift_name(-n));
  for (int j = 1; j <= n; ++j) {
    num *= th(h - Scalar(j) / 2 + Scalar(1));
    const int halves = n + 1 - 2 * j;
    den *= detail::nonsingular(th(h + Scalar(halves) / 2), detail::h_shift_name(halves));
  }
  return num / den;
}

/// prod_{j<k} [w_k - w_j + 1/2] / [w_k - w_j].
template <typename Scalar>
Complex<Scalar> prefactor_w_part(const ComplexVector<Scalar>& w,
                                 const NomeContext<Scalar>& ctx) {
  using detail::at;
  const auto th = detail::theta_of(ctx);
  const int n = static_cast<int>(w.size());
  Complex<Scalar> out{1};
  for (int j = 1; j <= n; ++j) {
    for (int k = j + 1; k <= n; ++k) {
      const Complex<Scalar> d = at(w, k) - at(w, j);
      out *= th(d + Scalar(0.5)) /
             detail::nonsingular(th(d), detail::indexed("w", k) + " - " + detail::indexed("w", j));
    }
  }
  return out;
}

/// prod_{j<k} [z_j - z_k + 1/2] / [z_j - z_k]; antisymmetric in the z's.
template <typename Scalar>
Complex<Scalar> z_symmetrizer(const ComplexVector<Scalar>& z, const NomeContext<Scalar>& ctx) {
  using detail::at;
  const auto th = detail::theta_of(ctx);
  const int n = static_cast<int>(z.size());
  Complex<Scalar> out{1};
  for (int j = 1; j <= n; ++j) {
    for (int k = j + 1; k <= n; ++k) {
      const Complex<Scalar> d = at(z, j) - at(z, k);
      out *= th(d + Scalar(0.5)) /
             detail::nonsingular(th(d), detail::indexed("z", j) + " - " + detail::indexed("z", k));
    }
  }
  return out;
}

/// Ratio det X_N / det Y_N: h-part times w-part. For N = 1 this is
/// [h+1/2] / [h-1/2].
template <typename Scalar>
Complex<Scalar> prefactor(const ParameterSet<Scalar>& ps, const NomeContext<Scalar>& ctx) {
  return prefactor_h_part(ps.h, ps.n(), ctx) * prefactor_w_part(ps.w, ctx);
}

/// Full coefficient c_N of det Y_N in R_N (prefactor times z-symmetrizer).
template <typename Scalar>
Complex<Scalar> right_coefficient(const ParameterSet<Scalar>& ps,
                                  const NomeContext<Scalar>& ctx) {
  return prefactor(ps, ctx) * z_symmetrizer(ps.z, ctx);
}

template <typename Scalar>
Complex<Scalar> eval_L(const ParameterSet<Scalar>& ps, const NomeContext<Scalar>& ctx) {
  return z_symmetrizer(ps.z, ctx) * det_lu(build_X(ps, ctx)).value;
}

template <typename Scalar>
Complex<Scalar> eval_R(const ParameterSet<Scalar>& ps, const NomeContext<Scalar>& ctx) {
  return right_coefficient(ps, ctx) * det_lu(build_Y(ps, ctx)).value;
}

template <typename Scalar>
DualityEvaluation<Scalar> identity_residual(const ParameterSet<Scalar>& ps,
                                            const NomeContext<Scalar>& ctx) {
  DualityEvaluation<Scalar> out;
  out.lhs = eval_L(ps, ctx);
  out.rhs = eval_R(ps, ctx);
  using std::abs;
  out.scale = abs(out.lhs) + abs(out.rhs) + Scalar(kTiny);
  out.residual = abs(out.lhs - out.rhs) / out.scale;
  return out;
}

/// L_N from the double sum over sigma in S_N and tau in {+1,-1}^N:
///
///   sum sgn(sigma) (-1)^{|tau|} prod_j [h+(j-N)/2+t_j+w_j]
///       prod_j prod_{l<j} [w_l+t_j+1/2] prod_j prod_{l>j} [w_l+t_j]
///       prod_j prod_l [w_l-t_j],     t_j = tau_{sigma(j)} z_{sigma(j)},
///
/// times the z-symmetrizer. No determinant routine is involved. N <= 5.
template <typename Scalar>
struct ExpansionSum {
  Complex<Scalar> value{};
  /// Largest |term| of the signed sum, symmetrizer included. The sum loses
  /// about log10(largest_term / |value|) digits to cancellation.
  Scalar largest_term{};
};

template <typename Scalar>
ExpansionSum<Scalar> expansion_sum_L(const ParameterSet<Scalar>& ps,
                                     const NomeContext<Scalar>& ctx) {
  using detail::at;
  using std::abs;
  const int n = ps.n();
  if (n > 5) throw DimensionError("expansion oracle capped at N = 5");
  auto th = [&ctx](const Complex<Scalar>& u) { return theta_reduced(u, ctx); };

  // factor[j][i][t]: the j-dependent product for t_j = +z_i (t = 0) or -z_i (t = 1).
  std::vector<std::vector<std::array<Complex<Scalar>, 2>>> factor(
      n + 1, std::vector<std::array<Complex<Scalar>, 2>>(n + 1));
  for (int i = 1; i <= n; ++i) {
    for (int t = 0; t < 2; ++t) {
      const Complex<Scalar> s = t == 0 ? at(ps.z, i) : -at(ps.z, i);
      for (int j = 1; j <= n; ++j) {
        Complex<Scalar> v = th(ps.h + Scalar(j - n) / 2 + s + at(ps.w, j));
        for (int l = 1; l <= n; ++l) {
          if (l < j) v *= th(at(ps.w, l) + s + Scalar(0.5));
          if (l > j) v *= th(at(ps.w, l) + s);
          v *= th(at(ps.w, l) - s);
        }
        factor[j][i][t] = v;
      }
    }
  }

  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 1);
  Complex<Scalar> total{0};
  Scalar largest(0);
  do {
    int inversions = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (sigma[a] > sigma[b]) ++inversions;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      // bit i-1 set <=> tau_i = -1
      Complex<Scalar> term{1};
      for (int j = 1; j <= n; ++j) {
        const int i = sigma[j - 1];
        term *= factor[j][i][(mask >> (i - 1)) & 1u];
      }
      largest = std::max(largest, abs(term));
      const int sign_flips = inversions + std::popcount(mask);
      total += (sign_flips % 2 == 0) ? term : -term;
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  const Complex<Scalar> sym = z_symmetrizer(ps.z, ctx);
  return {sym * total, abs(sym) * largest};
}

template <typename Scalar>
Complex<Scalar> expansion_oracle_L(const ParameterSet<Scalar>& ps,
                                   const NomeContext<Scalar>& ctx) {
  return expansion_sum_L(ps, ctx).value;
}

/// Four-term closed form of det X_2 (equivalently of prefactor * det Y_2).
template <typename Scalar>
Complex<Scalar> n2_closed_form(const ParameterSet<Scalar>& ps, const NomeContext<Scalar>& ctx) {
  if (ps.n() != 2) throw DimensionError("closed form exists for N = 2 only");
  auto th = [&ctx](const Complex<Scalar>& u) { return theta_reduced(u, ctx); };
  const Complex<Scalar> z1 = ps.z(0), z2 = ps.z(1), w1 = ps.w(0), w2 = ps.w(1), h = ps.h;
  const Scalar half(0.5);
  const Complex<Scalar> hw = h + half + w1 + w2;

  const Complex<Scalar> t1 =
      th(w1 - z1) * th(w1 - z2) * th(w2 - z1) * th(w2 - z2) * th(z1 - z2) * th(hw + z1 + z2);
  const Complex<Scalar> t2 =
      th(w1 - z1) * th(w1 + z2) * th(w2 - z1) * th(w2 + z2) * th(z1 + z2) * th(hw + z1 - z2);
  const Complex<Scalar> t3 =
      th(w1 + z1) * th(w1 - z2) * th(w2 + z1) * th(w2 - z2) * th(z1 + z2) * th(hw - z1 + z2);
  const Complex<Scalar> t4 =
      th(w1 + z1) * th(w1 + z2) * th(w2 + z1) * th(w2 + z2) * th(z1 - z2) * th(hw - z1 - z2);
  return th(h) * th(w2 - w1 + half) * (-t1 + t2 - t3 + t4);
}

}  // namespace thetadet
