#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace cloze {

// Deterministic randomness helpers. The engine is std::mt19937_64 (its output
// stream is fully specified by the standard); the value mappings below are
// spelled out by hand because the stdlib distributions are
// implementation-defined, which would break byte-identical split manifests
// and checkpoint reproducibility across toolchains.

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Uniform integer in [0, n) by rejection sampling.
inline std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = ~0ull - (~0ull % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller.
inline double gaussian(std::mt19937_64& rng) {
  double u1;
  do {
    u1 = uniform_real(rng);
  } while (u1 <= 0.0);
  const double u2 = uniform_real(rng);
  const double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Fisher-Yates permutation of [0, n).
inline std::vector<std::size_t> shuffle_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded_uniform(rng, i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace cloze
