#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nspforge/errors.hpp"

namespace nsp::rng {

using Engine = std::mt19937_64;

// Uniform integer in [0, n). Rejection sampling on raw engine output:
// unlike std::uniform_int_distribution, the draw sequence is pinned by the
// standard-mandated mt19937_64 stream, so seeded runs reproduce everywhere.
inline std::uint64_t below(Engine& eng, std::uint64_t n) {
  if (n == 0) throw RangeError("below: n must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double canonical(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1] — safe as a multiplicative-update initializer
// because it can never produce an exact zero.
inline double open_closed(Engine& eng) { return 1.0 - canonical(eng); }

inline bool bernoulli(Engine& eng, double p) { return canonical(eng) < p; }

// Index drawn with probability weight[i] / sum(weight). Weights must be
// non-negative with a positive sum.
inline std::size_t weighted_pick(Engine& eng, const std::vector<double>& weight) {
  double total = 0.0;
  for (double w : weight) {
    if (w < 0.0) throw RangeError("weighted_pick: negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw RangeError("weighted_pick: weights sum to zero");
  double u = canonical(eng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    acc += weight[i];
    if (u < acc) return i;
  }
  return weight.size() - 1;  // u landed on the rounding tail
}

}  // namespace nsp::rng
