#pragma once

#include <cstdint>
#include <random>

namespace roadnet {

/// Independent, reproducible stream for simulation `index` under `seed`.
/// std::mt19937_64 and std::seed_seq are fully specified by the standard, so
/// the sequence is identical across platforms and thread schedules.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) from the top 53 bits. Used instead of
/// std::uniform_real_distribution, whose output is implementation-defined.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

} // namespace roadnet
