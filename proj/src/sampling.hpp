#pragma once

// Deterministic per-sample random streams and the singularity-avoiding
// parameter sampler.

#include <bit>
#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

#include "thetadet/parameters.hpp"

namespace thetadet::sampling {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Stream seed for one sample, independent of scheduling.
inline std::uint64_t stream_seed(std::uint64_t seed, std::string_view check, int n, double q,
                                 int sample_index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ fnv1a(check));
  h = splitmix64(h ^ static_cast<std::uint64_t>(n));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(q));
  return splitmix64(h ^ static_cast<std::uint64_t>(sample_index));
}

/// mt19937_64 with a fixed uniform mapping, so draws do not depend on the
/// standard library's distribution implementation.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in the open interval (a, b).
  double uniform(double a, double b) {
    const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
    return a + (b - a) * u;
  }

  int index(int count) { return static_cast<int>(uniform(0, count)); }

 private:
  std::mt19937_64 engine_;
};

inline constexpr int kMaxAttempts = 1000;

/// Re uniform in (-0.45, 0.45), Im uniform in (0, tau_im / 4).
inline std::complex<double> coordinate(Stream& s, double tau_im) {
  const double re = s.uniform(-0.45, 0.45);
  return {re, s.uniform(0, tau_im / 4)};
}

/// Draws z, w (length n) and h until no singular combination lies within
/// kDeltaMin of the lattice. Throws std::logic_error after kMaxAttempts.
inline ParameterSet<double> parameters(Stream& s, int n, const NomeContext<double>& ctx) {
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    ComplexVector<double> z(n), w(n);
    for (int i = 0; i < n; ++i) z(i) = coordinate(s, ctx.tau_im());
    for (int i = 0; i < n; ++i) w(i) = coordinate(s, ctx.tau_im());
    const std::complex<double> h = coordinate(s, ctx.tau_im());
    ParameterSet<double> ps(std::move(z), std::move(w), h);
    if (!singular_combination(ps, ctx)) return ps;
  }
  throw std::logic_error("sampler exhausted its attempts");
}

}  // namespace thetadet::sampling
