#pragma once

#include <cstdint>
#include <cmath>
#include <utility>

#include <Eigen/Dense>

namespace hgd {

/// SplitMix64 (Steele/Lea/Vigna): a 64-bit counter-based generator. The
/// state advances by a fixed odd constant and each output is a bijective
/// mix of the counter, so the k-th draw is a pure function of (seed, k).
/// All randomness in this library flows through this generator so that a
/// run is replayable from its seed alone.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 random mantissa bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1].
  double uniform_open0() { return 1.0 - uniform01(); }

  /// Two independent standard normals via the Marsaglia polar transform.
  /// Uses only sqrt (exact under IEEE-754) and log, so the sequence is
  /// reproducible at the "same generator, same sequence" level.
  std::pair<double, double> normal_pair() {
    for (;;) {
      const double a = 2.0 * uniform01() - 1.0;
      const double b = 2.0 * uniform01() - 1.0;
      const double s = a * a + b * b;
      if (s > 0.0 && s < 1.0) {
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        return {a * f, b * f};
      }
    }
  }

  double normal() { return normal_pair().first; }

 private:
  std::uint64_t state_;
};

/// Standard-normal vector; entries are filled in index order, pairwise.
inline Eigen::VectorXd normal_vector(SplitMix64& rng, int n) {
  Eigen::VectorXd v(n);
  int i = 0;
  while (i + 1 < n) {
    auto [a, b] = rng.normal_pair();
    v[i] = a;
    v[i + 1] = b;
    i += 2;
  }
  if (i < n) v[i] = rng.normal();
  return v;
}

/// Uniform direction on the unit sphere in R^n.
inline Eigen::VectorXd sphere_direction(SplitMix64& rng, int n) {
  for (;;) {
    Eigen::VectorXd d = normal_vector(rng, n);
    const double norm = d.norm();
    if (norm > 1e-12) return d / norm;
  }
}

/// Uniform point in the closed ball of the given radius around center.
inline Eigen::VectorXd ball_point(SplitMix64& rng, const Eigen::VectorXd& center,
                                  double radius) {
  const int n = static_cast<int>(center.size());
  const double r = radius * std::pow(rng.uniform01(), 1.0 / n);
  return center + r * sphere_direction(rng, n);
}

}  // namespace hgd
