#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>

#include "roughavg/coefficients.hpp"
#include "roughavg/spectral_space.hpp"

namespace roughavg {

struct DriftTableOptions {
  double lattice_step = 0.05;
  std::size_t samples = 256;
  double t_star = 4.0;
  double step = 0.01;  ///< frozen-solve time step
  std::uint64_t seed = 0;
  /// Ergodicity slope for the t_star check; 0 means measure it at x = 0.
  double decay_slope = 0.0;
};

/// Averaged drift from ensemble estimates at lattice nodes over the active
/// modes, evaluated on demand, cached, and interpolated linearly in each
/// active coordinate. Every node uses the same frozen noise (common random
/// numbers), so the interpolant inherits the smoothness of the true drift.
///
/// Separable coefficient sets use one lattice coordinate shared by all
/// active modes; otherwise the lattice is the full product. Copies share the
/// cache; evaluation is thread-safe and deterministic.
class DriftTable {
 public:
  DriftTable(CoefficientSet c, Generator gen, DriftTableOptions opts);

  [[nodiscard]] Vec operator()(const Vec& x) const;

  [[nodiscard]] const DriftTableOptions& options() const noexcept;
  [[nodiscard]] double decay_slope() const noexcept;
  [[nodiscard]] std::size_t nodes() const;
  /// Largest stderr among evaluated nodes.
  [[nodiscard]] double max_stderr() const;
  /// max |second difference| / 8 along each lattice axis over evaluated
  /// neighbours: the leading linear-interpolation error.
  [[nodiscard]] double quantization_error() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

}  // namespace roughavg
