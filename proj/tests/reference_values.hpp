// Generated by tests/oracles/mp_reference.py (mpmath, 50 digits).
#pragma once

#include <complex>

namespace thetadet::reference {

/// Real and imaginary parts as unevaluated sums hi + lo of two doubles.
struct Exact {
  double re_hi, re_lo, im_hi, im_lo;

  std::complex<double> value() const { return {re_hi, im_hi}; }
};

inline constexpr Exact kTheta_u0p25_q0p5{0.0, 0.0, 1.0389096992324847, 5.52610486083506e-17};
inline constexpr Exact kTheta_u0p17_0p05i_q0p6{-0.21517592056114893, 1.3835082109213619e-18, 0.2896676824015138, -2.7734713866646608e-17};
inline constexpr Exact kTheta_u0p3_0p1i_q0p5{-0.8908784208634822, -2.162720050792971e-17, 1.391089222889778, -1.0281772275417635e-16};
inline constexpr Exact kTheta_um1p3_0p1i_q0p8{1.03191289727541, 1.154831772124336e-17, -0.20745798302855153, -1.040860032594984e-17};
inline constexpr Exact kTheta_u2p7_0p5i_q0p05{2.969991499259368, -1.7288281940308492e-16, 3.973891159461358, 5.099553636567854e-17};
inline constexpr Exact kN2_det_x{-1.0256173236405588, 5.5505481164757017e-17, -0.22894509529668108, -4.3274239623119665e-18};
inline constexpr Exact kN2_det_y{-0.11670481973976317, -5.400237063352801e-18, 0.007716543726014108, 4.375565304868147e-20};
inline constexpr Exact kN2_prefactor{8.620731957732442, 8.378111563043381e-16, 2.5317493404096343, 7.173149390586193e-17};
inline constexpr Exact kN2_lhs{-0.2817619838298811, 2.05851838190855e-17, -0.06289677714289636, -3.761494775472188e-18};
inline constexpr Exact kN2_rhs{-0.2817619838298811, 2.05851838190855e-17, -0.06289677714289636, -3.761494775472188e-18};
inline constexpr Exact kN3_det_x{9.637378066145873, -1.5400652948606247e-16, -5.32065887641481, -7.918401022482346e-17};
inline constexpr Exact kN3_det_y{-57.01365931530275, -8.780456943831052e-16, 4.568531214440176, 3.65537884798308e-16};
inline constexpr Exact kN3_prefactor{-0.17538813051897742, -1.0817573931292884e-17, 0.07926859601315796, -6.844097316366821e-19};
inline constexpr Exact kN3_lhs{-0.8149178316278252, 1.0005147179111244e-17, 0.401219380588301, 1.9077580670614657e-17};
inline constexpr Exact kN3_rhs{-0.8149178316278252, 1.0005147179111244e-17, 0.401219380588301, 1.9077580670614657e-17};

}  // namespace thetadet::reference
