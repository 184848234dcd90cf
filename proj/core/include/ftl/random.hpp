#pragma once

#include <cstdint>
#include <random>

namespace ftl {

// 53 random mantissa bits; independent of the standard library's
// distribution implementation so generated data is portable.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_uniform(rng);
}

}  // namespace ftl
