#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace roughavg {

/// Counter-based generator (Philox4x32-10). Every draw is a pure function of
/// (seed, sample, stream, index), so parallel schedules cannot change results.
///
/// Layout of the 128-bit counter: words 0-1 hold the 64-bit draw index,
/// word 2 the sample index, word 3 the stream id. The seed is the key.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  [[nodiscard]] std::array<std::uint32_t, 4> block(std::uint64_t index, std::uint32_t sample,
                                                   std::uint32_t stream) const noexcept;

  /// Two uniforms on the open interval (0, 1).
  [[nodiscard]] std::pair<double, double> uniform_pair(std::uint64_t index, std::uint32_t sample,
                                                       std::uint32_t stream) const noexcept;

  /// Box-Muller pair of independent standard normals.
  [[nodiscard]] std::pair<double, double> normal_pair(std::uint64_t index, std::uint32_t sample,
                                                      std::uint32_t stream) const noexcept;

  /// Standard normals for draw indices offset, offset+1, ...; normal k uses
  /// half k%2 of the Box-Muller pair at counter k/2.
  void fill_normal(std::uint32_t sample, std::uint32_t stream, std::uint64_t offset,
                   std::span<double> out) const noexcept;

 private:
  std::uint64_t seed_;
};

/// SplitMix64 finalizer; used to derive independent seeds from a master seed.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t master, std::uint64_t salt) noexcept;
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t master, std::string_view tag) noexcept;

// Stream ids. Components of one driver occupy consecutive ids from their base.
inline constexpr std::uint32_t kStreamSlowDriver = 0;
inline constexpr std::uint32_t kStreamFastDriver = 256;
inline constexpr std::uint32_t kStreamFrozen = 512;
inline constexpr std::uint32_t kStreamPairs = 1024;

}  // namespace roughavg
