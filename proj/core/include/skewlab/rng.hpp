#pragma once

#include <cstdint>
#include <random>

namespace skewlab {

// Independent stream for item `index` of a run seeded with `seed`.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// Uniform in [0,1) with 53 random bits; platform independent, unlike
// std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace skewlab
