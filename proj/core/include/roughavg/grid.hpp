#pragma once

#include <cstddef>
#include <vector>

namespace roughavg {

/// Strictly increasing time points t_0 < t_1 < ... < t_n.
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> times);

  static TimeGrid uniform(double horizon, std::size_t steps);

  [[nodiscard]] std::size_t points() const noexcept { return times_.size(); }
  [[nodiscard]] std::size_t steps() const noexcept { return times_.empty() ? 0 : times_.size() - 1; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return times_[i]; }
  [[nodiscard]] double front() const noexcept { return times_.front(); }
  [[nodiscard]] double back() const noexcept { return times_.back(); }
  [[nodiscard]] double horizon() const noexcept { return times_.back() - times_.front(); }
  [[nodiscard]] double dt(std::size_t i) const noexcept { return times_[i + 1] - times_[i]; }
  [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }

  /// True when every step equals horizon()/steps() to 1e-12 relative.
  [[nodiscard]] bool is_uniform() const noexcept { return uniform_; }
  /// Common step for uniform grids; otherwise the smallest step.
  [[nodiscard]] double step() const noexcept { return step_; }

  /// Every `factor`-th point of this grid; steps() must be divisible by factor.
  [[nodiscard]] TimeGrid coarsen(std::size_t factor) const;

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) { return a.times_ == b.times_; }

 private:
  std::vector<double> times_;
  bool uniform_ = false;
  double step_ = 0.0;
};

}  // namespace roughavg
