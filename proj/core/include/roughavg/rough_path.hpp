#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "roughavg/grid.hpp"

namespace roughavg {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Grid-sampled gamma-Hoelder rough path over R^D.
///
/// Stores the first level X_i at every grid point and the second level
/// X^2_{t_{i+1}, t_i} for every consecutive interval. Entry (a, b) of a
/// second-level block is the iterated integral of delta X^a against dX^b, so
/// Chen's relation reads
///
///   X^2_{t,s} = X^2_{t,u} + X^2_{u,s} + delta X_{u,s} (delta X_{t,u})^T.
///
/// Lifts built in this library also carry the anchored second level
/// X^2_{t_i, t_0}, accumulated directly on the fine subgrid. It is the
/// independent route that `chen_residual` checks the consecutive blocks
/// against; paths loaded from disk or assembled by hand may omit it.
class RoughPath {
 public:
  RoughPath(TimeGrid grid, std::size_t dim, double gamma, std::vector<double> first_level,
            std::vector<double> second_level, std::optional<std::vector<double>> anchored = std::nullopt);

  [[nodiscard]] const TimeGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t steps() const noexcept { return grid_.steps(); }
  [[nodiscard]] double gamma() const noexcept { return gamma_; }

  [[nodiscard]] Eigen::Map<const Eigen::VectorXd> value(std::size_t i) const;
  /// delta X_{t_j, t_i} = X_j - X_i.
  [[nodiscard]] Eigen::VectorXd increment(std::size_t i, std::size_t j) const;
  /// X^2_{t_{i+1}, t_i}.
  [[nodiscard]] Eigen::Map<const RowMatrix> block(std::size_t i) const;

  [[nodiscard]] bool has_anchored() const noexcept { return anchored_.has_value(); }
  /// X^2_{t_i, t_0}; requires has_anchored().
  [[nodiscard]] Eigen::Map<const RowMatrix> anchored(std::size_t i) const;

  [[nodiscard]] const std::vector<double>& first_level_data() const noexcept { return first_; }
  [[nodiscard]] const std::vector<double>& second_level_data() const noexcept { return blocks_; }
  [[nodiscard]] const std::optional<std::vector<double>>& anchored_data() const noexcept { return anchored_; }

  /// Copy with block i replaced (anchored level untouched).
  [[nodiscard]] RoughPath with_block(std::size_t i, const Eigen::Ref<const RowMatrix>& block) const;
  /// Copy without the anchored level.
  [[nodiscard]] RoughPath without_anchored() const;

 private:
  TimeGrid grid_;
  std::size_t dim_;
  double gamma_;
  std::vector<double> first_;   // (n+1) x D
  std::vector<double> blocks_;  // n x D x D
  std::optional<std::vector<double>> anchored_;  // (n+1) x D x D
};

/// X^2_{t_j, t_i} by Chen recursion over the consecutive blocks; i < j.
[[nodiscard]] RowMatrix reconstruct_second_level(const RoughPath& p, std::size_t i, std::size_t j);

/// All X^2_{t_j, t_0} for j = 0..n from the consecutive blocks.
[[nodiscard]] std::vector<RowMatrix> prefix_second_level(const RoughPath& p);

/// Maximum Frobenius defect of Chen's relation. Checks a deterministic sample
/// of triples s < u < t between recursively reconstructed blocks and, when
/// the anchored level is present, every triple (t_0, s, t) against it.
[[nodiscard]] double chen_residual(const RoughPath& p);

struct HolderStats {
  double path = 0.0;         ///< |X|_gamma
  double area = 0.0;         ///< |X^2|_{2 gamma}
  double homogeneous = 0.0;  ///< |X|_gamma + sqrt(|X^2|_{2 gamma})
  double distance = 0.0;     ///< d_gamma(0, X) = |X|_gamma + |X^2|_{2 gamma}
  bool exhaustive = true;    ///< false if grid pairs were subsampled
};

/// Discrete Hoelder statistics over grid pairs; gamma in (0, 1/2].
[[nodiscard]] HolderStats holder_stats(const RoughPath& p, double gamma);

/// d_gamma(X, Y) = |X - Y|_gamma + |X^2 - Y^2|_{2 gamma}; same grid and dim.
[[nodiscard]] double rough_distance(const RoughPath& a, const RoughPath& b, double gamma);

/// Binary dump: "RPTH1", D and n as little-endian uint64, gamma as double,
/// n+1 grid times, (n+1) x D first level, n consecutive D x D blocks, all
/// doubles little-endian and row-major. The anchored level is not written.
void write_rough_path(std::ostream& out, const RoughPath& p);
[[nodiscard]] RoughPath read_rough_path(std::istream& in);

}  // namespace roughavg
