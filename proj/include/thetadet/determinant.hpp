#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "thetadet/errors.hpp"

namespace thetadet {

template <typename Scalar>
using SquareMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct DetResult {
  std::complex<Scalar> value{0};
  /// Smallest |pivot| met during elimination (0 for a singular matrix).
  Scalar pivot_min{0};
  /// Largest intermediate |entry| over largest input |entry|.
  Scalar growth{0};
};

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw DimensionError("determinant needs a non-empty square matrix");
  }
  if (!m.allFinite()) {
    throw DomainError("matrix has non-finite entries");
  }
}

}  // namespace detail

/// Determinant by LU factorization with partial pivoting. A zero pivot ends
/// the elimination with value 0 and pivot_min 0.
template <typename Derived>
auto det_lu(const Eigen::MatrixBase<Derived>& m) {
  using C = typename Derived::Scalar;
  using Scalar = typename Eigen::NumTraits<C>::Real;
  detail::require_square(m);

  SquareMatrix<Scalar> a = m;
  const Eigen::Index n = a.rows();
  const Scalar input_max = a.cwiseAbs().maxCoeff();
  Scalar running_max = input_max;

  DetResult<Scalar> out;
  out.pivot_min = std::numeric_limits<Scalar>::infinity();
  C det{1};

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pivot_row = k;
    const Scalar pivot_abs = a.col(k).tail(n - k).cwiseAbs().maxCoeff(&pivot_row);
    pivot_row += k;
    if (pivot_abs == 0) {
      out.value = C{0};
      out.pivot_min = 0;
      out.growth = input_max > 0 ? running_max / input_max : Scalar(0);
      return out;
    }
    if (pivot_row != k) {
      a.row(k).swap(a.row(pivot_row));
      det = -det;
    }
    out.pivot_min = std::min(out.pivot_min, pivot_abs);
    const C pivot = a(k, k);
    det *= pivot;
    if (k + 1 < n) {
      const Eigen::Index rest = n - k - 1;
      a.col(k).tail(rest) /= pivot;
      a.bottomRightCorner(rest, rest).noalias() -=
          a.col(k).tail(rest) * a.row(k).tail(rest);
      running_max = std::max(running_max, a.bottomRightCorner(rest, rest).cwiseAbs().maxCoeff());
    }
  }
  out.value = det;
  out.growth = running_max / input_max;
  return out;
}

/// Leibniz sum over S_N by explicit enumeration. Capped at dim 6.
template <typename Derived>
typename Derived::Scalar det_expansion_oracle(const Eigen::MatrixBase<Derived>& m) {
  using C = typename Derived::Scalar;
  detail::require_square(m);
  const int n = static_cast<int>(m.rows());
  if (n > 6) throw DimensionError("Leibniz expansion capped at dimension 6");

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  C total{0};
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    C term{1};
    for (int row = 0; row < n; ++row) term *= m(row, perm[row]);
    total += (inversions % 2 == 0) ? term : -term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace thetadet
