#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "roughavg/error.hpp"
#include "roughavg/rough_path.hpp"

namespace roughavg {

namespace {

constexpr std::array<char, 5> kMagic = {'R', 'P', 'T', 'H', '1'};
constexpr std::uint64_t kMaxDim = 1u << 12;
constexpr std::uint64_t kMaxSteps = 1u << 28;

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (std::size_t k = 0; k < 8; ++k) bytes[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
  out.write(bytes.data(), 8);
}

void put_double(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), 8);
  require(static_cast<bool>(in), ErrorKind::invalid_input, "truncated rough path file");
  std::uint64_t v = 0;
  for (std::size_t k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
  return v;
}

double get_double(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_rough_path(std::ostream& out, const RoughPath& p) {
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, p.dim());
  put_u64(out, p.steps());
  put_double(out, p.gamma());
  for (double t : p.grid().times()) put_double(out, t);
  for (double v : p.first_level_data()) put_double(out, v);
  for (double v : p.second_level_data()) put_double(out, v);
  require(static_cast<bool>(out), ErrorKind::invalid_input, "failed to write rough path");
}

RoughPath read_rough_path(std::istream& in) {
  std::array<char, 5> magic{};
  in.read(magic.data(), magic.size());
  require(static_cast<bool>(in) && magic == kMagic, ErrorKind::invalid_input, "not a rough path file");
  const std::uint64_t dim = get_u64(in);
  const std::uint64_t steps = get_u64(in);
  require(dim >= 1 && dim <= kMaxDim && steps >= 1 && steps <= kMaxSteps, ErrorKind::invalid_input,
          "rough path header out of range");
  const double gamma = get_double(in);
  std::vector<double> times(steps + 1);
  for (double& t : times) t = get_double(in);
  std::vector<double> first((steps + 1) * dim);
  for (double& v : first) v = get_double(in);
  std::vector<double> blocks(steps * dim * dim);
  for (double& v : blocks) v = get_double(in);
  return RoughPath(TimeGrid(std::move(times)), dim, gamma, std::move(first), std::move(blocks));
}

}  // namespace roughavg
