#include "roughavg/rng.hpp"

#include <cmath>
#include <numbers>

namespace roughavg {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t index, std::uint32_t sample,
                                               std::uint32_t stream) const noexcept {
  std::array<std::uint32_t, 4> c{static_cast<std::uint32_t>(index),
                                 static_cast<std::uint32_t>(index >> 32), sample, stream};
  std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0, static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1, static_cast<std::uint32_t>(p0)};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

std::pair<double, double> CounterRng::uniform_pair(std::uint64_t index, std::uint32_t sample,
                                                   std::uint32_t stream) const noexcept {
  const auto b = block(index, sample, stream);
  return {to_open_unit(b[0], b[1]), to_open_unit(b[2], b[3])};
}

std::pair<double, double> CounterRng::normal_pair(std::uint64_t index, std::uint32_t sample,
                                                  std::uint32_t stream) const noexcept {
  const auto [u1, u2] = uniform_pair(index, sample, stream);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

void CounterRng::fill_normal(std::uint32_t sample, std::uint32_t stream, std::uint64_t offset,
                             std::span<double> out) const noexcept {
  std::size_t k = 0;
  std::uint64_t draw = offset;
  if (draw % 2 == 1 && k < out.size()) {
    out[k++] = normal_pair(draw / 2, sample, stream).second;
    ++draw;
  }
  for (; k + 1 < out.size(); k += 2, draw += 2) {
    const auto [a, b] = normal_pair(draw / 2, sample, stream);
    out[k] = a;
    out[k + 1] = b;
  }
  if (k < out.size()) out[k] = normal_pair(draw / 2, sample, stream).first;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t salt) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t master, std::string_view tag) noexcept {
  // FNV-1a over the tag, then SplitMix.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char ch : tag) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ull;
  }
  return mix_seed(master, h);
}

}  // namespace roughavg
