#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "roughavg/coefficients.hpp"
#include "roughavg/grid.hpp"
#include "roughavg/rough_path.hpp"
#include "roughavg/spectral_space.hpp"

namespace roughavg {

/// Frozen fast equation dY = [AY + F2(x, Y)] dt + G2(x, Y) dW on a uniform
/// grid of step h up to T, driven by the frozen noise stream of `seed`.
/// Returns Y at every step (ceil(T / h) steps, the last one shortened).
[[nodiscard]] std::vector<Vec> frozen_solve(const Vec& x, const Vec& y, const CoefficientSet& c, const Generator& gen,
                                            double horizon, double h, std::uint64_t seed, std::uint32_t sample = 0);

/// Endpoint of frozen_solve without storing the path.
[[nodiscard]] Vec frozen_endpoint(const Vec& x, const Vec& y, const CoefficientSet& c, const Generator& gen,
                                  double horizon, double h, std::uint64_t seed, std::uint32_t sample = 0);

struct ErgodicityFit {
  std::vector<double> times;
  std::vector<double> mean_sq;  ///< E ||Y^{x,y1}_t - Y^{x,y2}_t||^2
  double slope = 0.0;           ///< least-squares slope of log mean_sq over the fit window
  double fit_start = 0.0;
};

/// Couples two frozen solves on the same noise and fits the log decay of the
/// mean-square difference over t in [T/10, T]. The slope is -inf when the
/// difference vanishes identically.
[[nodiscard]] ErgodicityFit ergodicity_decay(const Vec& x, const Vec& y1, const Vec& y2, const CoefficientSet& c,
                                             const Generator& gen, double horizon, double h, std::size_t samples,
                                             std::uint64_t seed);

/// Sufficient slope bound -(lambda_1 - L_F2 - L_G2^2).
[[nodiscard]] double ergodicity_rate_bound(const CoefficientSet& c, const Generator& gen);

struct AveragedDriftEstimate {
  SpectralVector x;
  SpectralVector value;
  double stderr = 0.0;  ///< Euclidean norm of the per-mode standard errors
  double burn_in = 0.0;
  std::size_t samples = 0;
};

/// Ensemble average of F1(x, Y_{t_star}) over independent frozen solves
/// started at y0. `decay_slope` is a measured ergodicity slope; t_star must
/// satisfy exp(decay_slope * t_star) <= 1e-3.
[[nodiscard]] AveragedDriftEstimate averaged_drift(const Vec& x, const CoefficientSet& c, const Generator& gen,
                                                   double t_star, std::size_t samples, double h, std::uint64_t seed,
                                                   double decay_slope, const std::optional<Vec>& y0 = std::nullopt);

/// Smallest t_star meeting the precondition for a given slope.
[[nodiscard]] double min_t_star(double decay_slope);

using DriftOracle = std::function<Vec(const Vec&)>;

/// Slow block of the scheme with F1 replaced by `drift`, driven by B.
[[nodiscard]] std::vector<Vec> solve_averaged(const Vec& x0, const CoefficientSet& c, const Generator& gen,
                                              const RoughPath& b, const DriftOracle& drift);

/// Fast equation with the slow argument held at X_{t(delta)},
/// t(delta) = floor(t / delta) delta, driven by the W components of `driver`.
[[nodiscard]] std::vector<Vec> auxiliary_solve(const std::vector<Vec>& x_path, const Vec& y0, const CoefficientSet& c,
                                               const Generator& gen, const RoughPath& driver, std::size_t w_offset,
                                               double eps, double delta);

/// sup over grid pairs s < t of ||D_t - S_{t-s} D_s||_{H_0} / |t-s|^eta with
/// D = xe - xbar. Grids over 2048 steps use the subsampled pair set.
[[nodiscard]] double reduced_holder_error(const std::vector<Vec>& xe, const std::vector<Vec>& xbar,
                                          const SemigroupTable& table, double eta);
[[nodiscard]] double reduced_holder_error(const std::vector<Vec>& xe, const std::vector<Vec>& xbar,
                                          const TimeGrid& grid, const Generator& gen, double eta);

/// eps^{1 / (2 (1 + 2 gamma))}.
[[nodiscard]] double delta_schedule(double eps, double gamma);

/// Smallest positive multiple of `step` that is >= delta (up to 1e-9 relative).
[[nodiscard]] double round_up_to_step(double delta, double step);

}  // namespace roughavg
