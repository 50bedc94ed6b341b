#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace roughavg {

struct IndexPair {
  std::uint32_t i;  // earlier grid index
  std::uint32_t j;  // later grid index, j > i
};

/// Grid pairs over which discrete Hoelder sups are taken.
struct PairSet {
  std::vector<IndexPair> pairs;
  bool exhaustive = true;  // false when the deterministic subsample was used
};

inline constexpr std::size_t kExhaustivePairSteps = 2048;
inline constexpr std::size_t kRandomPairCount = 100000;

/// All pairs i < j for grids with at most 2048 steps; beyond that every pair
/// at a dyadic gap (1, 2, 4, ...) plus 1e5 pairs from a fixed seeded stream.
[[nodiscard]] const PairSet& holder_pairs(std::size_t steps);

}  // namespace roughavg
