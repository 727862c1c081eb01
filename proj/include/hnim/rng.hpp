#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace hnim {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the random stream owned by one trial.
///
/// The stream depends only on (master seed, sweep point, trial index), so the
/// assignment of trials to workers cannot change any draw.
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t point,
                                   std::uint64_t trial) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (point * 0xD1B54A32D192ED03ULL));
  return splitmix64(h ^ trial);
}

inline Rng make_trial_rng(std::uint64_t master, std::uint64_t point, std::uint64_t trial) {
  return Rng{trial_seed(master, point, trial)};
}

/// Circularly-symmetric complex Gaussian sample with E|z|^2 = variance.
inline std::complex<double> complex_gaussian(Rng& rng, double variance) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s = std::sqrt(variance / 2.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return {s * re, s * im};
}

inline std::uint8_t random_bit(Rng& rng) { return static_cast<std::uint8_t>(rng() >> 63); }

}  // namespace hnim
