#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "thetadet/determinant.hpp"
#include "thetadet/double_double.hpp"
#include "thetadet/errors.hpp"

using namespace thetadet;
using thetadet::testing::C;
using thetadet::testing::rel;

namespace {

SquareMatrix<double> random_disc(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> radius(0, 1), angle(0, 2 * std::numbers::pi);
  SquareMatrix<double> m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = std::polar(std::sqrt(radius(rng)), angle(rng));
  }
  return m;
}

}  // namespace

TEST_CASE("identity and rank-deficient matrices") {
  const SquareMatrix<double> eye = SquareMatrix<double>::Identity(3, 3);
  const auto r = det_lu(eye);
  CHECK(r.value == C(1));
  CHECK(r.pivot_min == 1.0);
  CHECK(r.growth == 1.0);

  SquareMatrix<double> twin(2, 2);
  twin << C(1, 2), C(3, -1), C(1, 2), C(3, -1);
  const auto t = det_lu(twin);
  CHECK(t.value == C(0));
  CHECK(t.pivot_min == 0.0);

  const SquareMatrix<double> zero = SquareMatrix<double>::Zero(3, 3);
  CHECK(det_lu(zero).value == C(0));
}

TEST_CASE("small closed forms") {
  SquareMatrix<double> one(1, 1);
  one << C(0.3, -0.7);
  CHECK(det_expansion_oracle(one) == C(0.3, -0.7));
  CHECK(det_lu(one).value == C(0.3, -0.7));

  const C a(1, 2), b(-0.5, 0.1), c(0.25, 3), d(2, -1);
  SquareMatrix<double> two(2, 2);
  two << a, b, c, d;
  CHECK(rel(det_expansion_oracle(two), a * d - b * c) < 1e-15);
  CHECK(rel(det_lu(two).value, a * d - b * c) < 1e-15);
}

TEST_CASE("LU against the Leibniz expansion") {
  std::mt19937_64 rng(2024);
  for (int n = 1; n <= 5; ++n) {
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
      const SquareMatrix<double> m = random_disc(rng, n);
      worst = std::max(worst, rel(det_lu(m).value, det_expansion_oracle(m)));
    }
    CAPTURE(n);
    CHECK(worst < 1e-12);
  }
  const SquareMatrix<double> six = random_disc(rng, 6);
  CHECK(rel(det_lu(six).value, det_expansion_oracle(six)) < 1e-12);
}

TEST_CASE("row swap negates") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    SquareMatrix<double> m = random_disc(rng, 4);
    const C before = det_lu(m).value;
    m.row(0).swap(m.row(2));
    CHECK(rel(det_lu(m).value, -before) < 1e-13);
  }
}

TEST_CASE("triangular matrices give the diagonal product") {
  std::mt19937_64 rng(9);
  SquareMatrix<double> m = random_disc(rng, 5);
  m.triangularView<Eigen::StrictlyLower>().setZero();
  // Make the diagonal dominant so no row swap happens.
  C expected(1);
  for (int i = 0; i < 5; ++i) {
    m(i, i) *= 10.0;
    expected *= m(i, i);
  }
  CHECK(rel(det_lu(m).value, expected) < 4 * 5 * 1e-16);
}

TEST_CASE("telemetry") {
  SquareMatrix<double> m(2, 2);
  m << C(1e-3), C(1), C(1), C(1);
  const auto r = det_lu(m);
  CHECK(rel(r.value, C(1e-3 - 1)) < 1e-15);
  CHECK(r.pivot_min == doctest::Approx(1 - 1e-3));
  CHECK(r.growth >= 1.0);
}

TEST_CASE("dimension errors") {
  const SquareMatrix<double> rect(2, 3);
  CHECK_THROWS_AS(det_lu(rect), DimensionError);
  CHECK_THROWS_AS(det_expansion_oracle(SquareMatrix<double>::Identity(7, 7)), DimensionError);
  CHECK_THROWS_AS(det_lu(SquareMatrix<double>(0, 0)), DimensionError);
}

TEST_CASE("double-double scalar") {
  std::mt19937_64 rng(77);
  const SquareMatrix<double> m = random_disc(rng, 5);
  const SquareMatrix<DoubleDouble> md = m.cast<std::complex<DoubleDouble>>();
  const auto lu = det_lu(md).value;
  const auto leibniz = det_expansion_oracle(md);
  CHECK(static_cast<double>(abs(lu - leibniz) / abs(leibniz)) < 1e-28);
  CHECK(rel(testing::narrow(lu), det_lu(m).value) < 1e-13);
}
