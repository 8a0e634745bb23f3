#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace selfcal::rng {

// Counter-based random streams: every draw is a pure function of (key, counter),
// so results do not depend on evaluation order or thread count.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Folds a seed and a list of integer labels into a stream key.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) noexcept {
  std::uint64_t h = mix64(seed + kGolden);
  for (std::uint64_t label : labels) h = mix64(h ^ (label + kGolden + (h << 6) + (h >> 2)));
  return h;
}

constexpr std::uint64_t bits(std::uint64_t key, std::uint64_t counter) noexcept {
  return mix64(key + (counter + 1) * kGolden);
}

/// Uniform on [0, 1).
constexpr double uniform(std::uint64_t key, std::uint64_t counter) noexcept {
  return static_cast<double>(bits(key, counter) >> 11) * 0x1.0p-53;
}

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance (Box-Muller on two
/// uniforms, so real and imaginary parts each carry variance / 2).
inline std::complex<double> circular_normal(std::uint64_t key, std::uint64_t counter, double variance) noexcept {
  const double u1 = 1.0 - uniform(key, 2 * counter);  // (0, 1]
  const double u2 = uniform(key, 2 * counter + 1);
  const double radius = std::sqrt(-variance * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace selfcal::rng
