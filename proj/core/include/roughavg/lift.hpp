#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "roughavg/grid.hpp"
#include "roughavg/rng.hpp"
#include "roughavg/rough_path.hpp"

namespace roughavg {

enum class LiftKind { brownian_ito, brownian_strat, fbm, smooth };

[[nodiscard]] LiftKind parse_lift_kind(std::string_view name);
[[nodiscard]] const char* to_string(LiftKind kind) noexcept;

struct LiftSpec {
  LiftKind kind = LiftKind::brownian_ito;
  double hurst = 0.5;            ///< fbm only, in (1/3, 1/2]
  std::size_t fine_factor = 64;  ///< fine steps per coarse step
  std::uint64_t seed = 0;
  double gamma = 0.4;            ///< declared exponent of the emitted path

  void validate() const;
};

/// Ceiling on fine points for the circulant fBm sampler.
inline constexpr std::size_t kMaxFbmFinePoints = std::size_t{1} << 20;

/// Driver increments on the fine subgrid: every coarse step split into
/// fine_factor equal parts. Row k of `increments` is the increment over fine
/// step k.
struct FinePath {
  TimeGrid coarse;
  std::size_t fine_factor = 1;
  std::size_t dim = 0;
  std::vector<double> increments;

  [[nodiscard]] std::size_t fine_steps() const noexcept { return coarse.steps() * fine_factor; }
  [[nodiscard]] double fine_dt(std::size_t k) const noexcept {
    return coarse.dt(k / fine_factor) / static_cast<double>(fine_factor);
  }
  [[nodiscard]] const double* step(std::size_t k) const noexcept { return increments.data() + k * dim; }
};

/// Draws fine driver paths for one LiftSpec. Brownian draws are indexed by
/// global fine step, so a grid with n steps and fine factor F shares its
/// noise with n*F/F' steps at factor F' on a uniform grid.
///
/// Cheap to copy; the fBm circulant spectrum is computed once and shared.
/// draw() is safe to call concurrently.
class FineSampler {
 public:
  FineSampler(LiftSpec spec, TimeGrid grid, std::size_t dim, std::uint32_t stream_base = kStreamSlowDriver);

  [[nodiscard]] const LiftSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const TimeGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

  [[nodiscard]] FinePath draw(std::uint32_t sample) const;

 private:
  struct Circulant;

  LiftSpec spec_;
  TimeGrid grid_;
  std::size_t dim_;
  std::uint32_t stream_base_;
  std::shared_ptr<const Circulant> circulant_;
};

enum class IntegrationRule { left_point, trapezoid };

/// Left point for Ito Brownian lifts, trapezoid for everything else.
[[nodiscard]] IntegrationRule rule_for(LiftKind kind) noexcept;

/// Coarse rough path from fine increments, second level by fine sums.
[[nodiscard]] RoughPath lift_fine(const FinePath& fine, IntegrationRule rule, double gamma);

[[nodiscard]] RoughPath lift_brownian(const LiftSpec& spec, const TimeGrid& grid, std::size_t m,
                                      std::uint32_t sample = 0);
[[nodiscard]] RoughPath lift_fbm(const LiftSpec& spec, const TimeGrid& grid, std::size_t d,
                                 std::uint32_t sample = 0);

/// Exact lift from closed forms: `value(t)` is X_t and `area(s, t)` is X^2_{t,s}.
[[nodiscard]] RoughPath lift_smooth(const TimeGrid& grid, std::size_t dim, double gamma,
                                    const std::function<Eigen::VectorXd(double)>& value,
                                    const std::function<Eigen::MatrixXd(double, double)>& area);

/// Mixed lift over R^{d+m}: diagonal blocks copied from B and W, the
/// top-right block by left-point fine sums of delta B against dW, the
/// bottom-left block by integration by parts.
[[nodiscard]] RoughPath join_mixed(const RoughPath& b, const RoughPath& w, const FinePath& b_fine,
                                   const FinePath& w_fine);

struct MixedSample {
  RoughPath slow;
  RoughPath fast;
  RoughPath xi;
};

/// One sample of (B, W, Xi); the fast sampler must be an Ito Brownian one.
[[nodiscard]] MixedSample sample_mixed(const FineSampler& slow, const FineSampler& fast, std::uint32_t sample);

}  // namespace roughavg
