#pragma once

#include <cstdint>

namespace pmitame {

// SplitMix64 finalizer.
inline uint64_t mix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based uniform draw in [0, 1). The same (seed, a, b, c) always
// yields the same value, independent of call order, which keeps multistart
// sampling deterministic under any evaluation schedule.
inline double counter_uniform(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  uint64_t h = mix64(seed);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  h = mix64(h ^ c);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Uniform draw from [lo, hi).
inline double counter_uniform_in(double lo, double hi, uint64_t seed, uint64_t a,
                                 uint64_t b = 0, uint64_t c = 0) {
  return lo + (hi - lo) * counter_uniform(seed, a, b, c);
}

}  // namespace pmitame
