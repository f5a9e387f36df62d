#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "fogplace/util.hpp"

namespace fogplace {

// Deterministic random source. The engine (std::mt19937_64) is fully
// specified by the C++ standard; the distributions below are hand-rolled
// because the std:: distribution objects are not portable across standard
// library implementations. Same seed => same stream, everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Uniform real in [lo, hi); 53-bit mantissa construction.
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  // Unbiased uniform integer in [0, n), n >= 1. Rejection sampling.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (max % n + 1) % n;  // 2^64 mod n
    std::uint64_t x = engine_();
    while (rem != 0 && x >= max - rem + 1) {
      x = engine_();
    }
    return x % n;
  }

  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fogplace
