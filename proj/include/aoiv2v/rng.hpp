#pragma once

#include <cstdint>
#include <random>

namespace aoiv2v {

using Rng = std::mt19937_64;

/// Independent named substreams so that changing how much one subsystem
/// draws does not shift the others (common random numbers across policies).
enum class Stream : std::uint32_t {
  kMobility = 1,
  kFading = 2,
  kArrivals = 3,
  kBlockErrors = 4,
  kClustering = 5,
  kPilot = 6,
};

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x5eedu};
  return Rng(seq);
}

}  // namespace aoiv2v
