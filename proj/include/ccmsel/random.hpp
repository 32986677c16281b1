#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ccmsel {

/// All sampling uses mt19937_64 plus the hand-written transforms below, so
/// results are bit-identical across standard libraries (std distributions
/// are implementation-defined).
using Rng = std::mt19937_64;

/// Independent stream `stream` of master seed `seed`. Sample i of an
/// estimator always draws from stream i, so merged results do not depend on
/// how samples are split across workers.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x43434du};
  return Rng(seq);
}

/// Uniform on [0, 1).
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer on [0, n); n > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

inline double exponential(Rng& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

inline double standard_normal(Rng& rng) {
  // Box-Muller; the second variate is discarded to keep the stream stateless.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace ccmsel
