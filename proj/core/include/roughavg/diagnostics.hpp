#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "roughavg/coefficients.hpp"
#include "roughavg/lift.hpp"
#include "roughavg/spectral_space.hpp"

namespace roughavg {

/// 17 significant digits, the CSV float format.
[[nodiscard]] std::string format_real(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const;
};

struct DiagReport {
  std::string name;
  bool pass = false;
  CsvTable table;
  std::vector<std::pair<std::string, double>> metrics;

  /// Throws invalid-input for an unknown metric.
  [[nodiscard]] double metric(const std::string& key) const;
  void add_metric(std::string key, double value) { metrics.emplace_back(std::move(key), value); }
};

struct ChenStudy {
  std::size_t seeds = 100;
  std::size_t steps = 256;
  std::size_t fine_factor = 16;
  std::size_t dim = 2;
  std::vector<double> hursts = {0.35, 0.4, 0.45, 0.5};
  std::uint64_t seed = 1;
};
/// Chen residuals of Ito, Stratonovich, fBm and mixed lifts; passes at <= 1e-12.
[[nodiscard]] DiagReport chen_study(const ChenStudy& p);

struct ItoSymmetryStudy {
  std::vector<std::size_t> fine_factors = {16, 32, 64, 128};
  std::size_t samples = 200;
  std::size_t steps = 64;
  std::size_t dim = 2;
  std::uint64_t seed = 2;
};
/// Mean-square defect of W^2 + (W^2)^T - dW dW^T + (t-s) I per fine factor;
/// passes when every doubling ratio lies in [0.4, 0.6].
[[nodiscard]] DiagReport ito_symmetry_study(const ItoSymmetryStudy& p);

struct SewingRateStudy {
  std::vector<std::size_t> steps = {16, 32, 64, 128, 256};
  std::size_t refine = 16;
  std::size_t reference_fine = 4;  ///< fine steps per reference step
  std::size_t samples = 64;
  std::size_t dim = 2;
  double gamma = 0.4;
  std::uint64_t seed = 3;
};
/// Richardson study of the compensated sum for an Ito Brownian driver and the
/// integrand Y^k = sin(1 + X^k) e_k; passes at slope >= 0.15.
[[nodiscard]] DiagReport sewing_rate_study(const SewingRateStudy& p, const Generator& gen);

struct ConvolutionSmoothStudy {
  std::vector<std::size_t> steps = {512, 1024, 2048, 4096};
  double constant = 1.0;
  double span = 1.0;
};
/// Compensated sum for X_u = u, Y = c e_1 against c (1 - e^{-lambda_1 span}) / lambda_1;
/// passes when the finest error is <= 1e-6.
[[nodiscard]] DiagReport convolution_smooth_study(const ConvolutionSmoothStudy& p, const Generator& gen);

struct ErgodicityStudy {
  double horizon = 10.0;
  double step = 0.01;
  std::size_t samples = 256;
  std::uint64_t seed = 4;
};
/// Coupled frozen solves from y1 = 0 and y2 = (1, ..., 1) at x = 0; passes
/// when the slope is <= -(lambda_1 - L_F2 - L_G2^2).
[[nodiscard]] DiagReport ergodicity_study(const ErgodicityStudy& p, const CoefficientSet& c, const Generator& gen);

struct FrozenOracleStudy {
  std::size_t points = 5;
  std::size_t samples = 1024;
  double t_star = 8.0;
  double step = 0.005;
  std::uint64_t seed = 5;
};
/// Ensemble averaged drift against the closed form at random x; passes when
/// every estimate is within 3 stderr and every stderr is <= 1e-2.
[[nodiscard]] DiagReport frozen_oracle_study(const FrozenOracleStudy& p, const CoefficientSet& c,
                                             const Generator& gen);

/// Slow-fast data shared by the solver studies.
struct SolverStudy {
  LiftSpec slow;  ///< slow driver; its fine_factor is ignored
  double eps = 1e-2;
  double horizon = 1.0;
  std::size_t samples = 64;
  Vec x0;
  Vec y0;
};

struct FastConsistencyStudy {
  std::vector<std::size_t> steps = {512, 1024, 2048, 4096};
  std::size_t fine_steps = 65536;  ///< shared fine grid, so every level sees the same paths
};
/// E sup_t ||Y_rough - Y_ito||^2 per grid; passes when it decreases at every
/// refinement (paired differences, 2 stderr slack) and overall, or when the
/// two schemes agree to roundoff at every level (metric `exact`).
[[nodiscard]] DiagReport fast_consistency_study(const FastConsistencyStudy& p, const SolverStudy& s,
                                                const CoefficientSet& c, const Generator& gen);

struct AuxGapStudy {
  std::size_t steps = 1024;
  std::size_t fine_factor = 16;
  std::vector<std::size_t> block_steps = {4, 8, 16, 32, 64, 128};  ///< delta / h
  double eta = 0.3;
};
/// sup_t E ||Y - Yhat||^4 per delta; passes at log-log slope >= 2 eta.
[[nodiscard]] DiagReport aux_gap_study(const AuxGapStudy& p, const SolverStudy& s, const CoefficientSet& c,
                                       const Generator& gen);

struct HolderIncrementStudy {
  std::size_t steps = 1024;
  std::size_t fine_factor = 16;
  std::vector<std::size_t> lags = {1, 2, 4, 8, 16, 32, 64};
  double eta = 0.3;
};
/// E ||X_{t+h} - X_t||^4 over lags; passes at log-log slope >= 4 eta - 0.5.
[[nodiscard]] DiagReport holder_increment_study(const HolderIncrementStudy& p, const SolverStudy& s,
                                                const CoefficientSet& c, const Generator& gen);

/// Least-squares slope of log y against log x.
[[nodiscard]] double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace roughavg
