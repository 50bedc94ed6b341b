#include "roughavg/grid.hpp"

#include <algorithm>
#include <cmath>

#include "roughavg/error.hpp"

namespace roughavg {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  require(times_.size() >= 2, ErrorKind::invalid_input, "time grid needs at least two points");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    require(std::isfinite(times_[i]), ErrorKind::invalid_input, "time grid has a non-finite point");
    if (i > 0) {
      require(times_[i] > times_[i - 1], ErrorKind::invalid_input,
              "time grid must be strictly increasing");
    }
  }
  const double nominal = horizon() / static_cast<double>(steps());
  uniform_ = true;
  step_ = nominal;
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    const double h = dt(i);
    if (std::abs(h - nominal) > 1e-12 * std::max(1.0, nominal) + 1e-12 * std::abs(times_[i + 1])) {
      uniform_ = false;
    }
  }
  if (!uniform_) {
    step_ = dt(0);
    for (std::size_t i = 1; i + 1 < times_.size(); ++i) step_ = std::min(step_, dt(i));
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
  require(steps >= 1, ErrorKind::invalid_input, "uniform grid needs at least one step");
  require(horizon > 0.0 && std::isfinite(horizon), ErrorKind::invalid_input,
          "uniform grid horizon must be positive");
  std::vector<double> t(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    t[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
  }
  return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::coarsen(std::size_t factor) const {
  require(factor >= 1 && steps() % factor == 0, ErrorKind::invalid_input,
          "coarsening factor must divide the step count");
  std::vector<double> t;
  t.reserve(steps() / factor + 1);
  for (std::size_t i = 0; i < times_.size(); i += factor) t.push_back(times_[i]);
  return TimeGrid(std::move(t));
}

}  // namespace roughavg
