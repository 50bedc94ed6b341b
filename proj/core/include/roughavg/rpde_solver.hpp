#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "roughavg/coefficients.hpp"
#include "roughavg/controlled.hpp"
#include "roughavg/rough_path.hpp"
#include "roughavg/spectral_space.hpp"

namespace roughavg {

struct H4Check {
  bool pass = false;
  double margin = 0.0;  ///< lambda_1 - L_F2 - 3 L_G2^2
};

[[nodiscard]] H4Check verify_h4(const CoefficientSet& c, const Generator& gen);

struct SlowFastState {
  SpectralVector x;
  SpectralVector y;
  double t = 0.0;
};

/// Mixed-lift data on one step: increments of B and W, the B^2 and W^2
/// blocks and the cross block I[B,W].
struct StepNoise {
  Vec db;
  Vec dw;
  Mat bb;
  Mat ww;
  Mat bw;
};

/// Step i of a mixed lift over R^{d+m}, with the slow driver first.
[[nodiscard]] StepNoise step_noise(const RoughPath& xi, std::size_t d, std::size_t i);

/// One mild rough Euler step of the coupled system with step h.
[[nodiscard]] SlowFastState step_slow_fast(const SlowFastState& state, const CoefficientSet& c, const Generator& gen,
                                           const StepNoise& noise, double eps, double h);

/// Trajectory on a grid; x[i] and y[i] sit at grid point i.
struct SlowFastPath {
  TimeGrid grid;
  std::vector<Vec> x;
  std::vector<Vec> y;
};

/// Iterates step_slow_fast over the grid of xi (slow components first).
[[nodiscard]] SlowFastPath solve_slow_fast(const Vec& x0, const Vec& y0, const CoefficientSet& c, const Generator& gen,
                                           const RoughPath& xi, double eps);

/// (X, G1(X)) packaged as a path controlled by the slow driver B.
[[nodiscard]] ControlledPath slow_controlled(const std::vector<Vec>& x, const TimeGrid& grid, const CoefficientSet& c);

/// Exponential Euler for the fast equation driven by the Ito increments of
/// components [w_offset, w_offset + m) of `driver`. `x_path` holds one slow
/// state per grid point, or a single frozen state.
[[nodiscard]] std::vector<Vec> solve_fast_ito(const std::vector<Vec>& x_path, const Vec& y0, const CoefficientSet& c,
                                              const Generator& gen, const RoughPath& driver, std::size_t w_offset,
                                              double eps);

}  // namespace roughavg
