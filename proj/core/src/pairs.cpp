#include "roughavg/pairs.hpp"

#include <map>
#include <memory>
#include <mutex>

#include "roughavg/rng.hpp"

namespace roughavg {
namespace {

constexpr std::uint64_t kPairSeed = 0x70a1'25ee'd000'0001ull;

PairSet build_pairs(std::size_t steps) {
  PairSet set;
  const auto n = static_cast<std::uint32_t>(steps);
  if (steps <= kExhaustivePairSteps) {
    set.pairs.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = i + 1; j <= n; ++j) set.pairs.push_back({i, j});
    }
    return set;
  }
  set.exhaustive = false;
  for (std::uint32_t gap = 1; gap <= n; gap *= 2) {
    for (std::uint32_t i = 0; i + gap <= n; ++i) set.pairs.push_back({i, i + gap});
  }
  const CounterRng rng(kPairSeed);
  for (std::uint64_t k = 0; k < kRandomPairCount; ++k) {
    const auto [u, v] = rng.uniform_pair(k, n, kStreamPairs);
    auto a = static_cast<std::uint32_t>(u * (n + 1));
    auto b = static_cast<std::uint32_t>(v * (n + 1));
    if (a > n) a = n;
    if (b > n) b = n;
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    set.pairs.push_back({a, b});
  }
  return set;
}

}  // namespace

const PairSet& holder_pairs(std::size_t steps) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<PairSet>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[steps];
  if (!slot) slot = std::make_unique<PairSet>(build_pairs(steps));
  return *slot;
}

}  // namespace roughavg
