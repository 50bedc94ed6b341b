#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "roughavg/grid.hpp"
#include "roughavg/rough_path.hpp"
#include "roughavg/spectral_space.hpp"

namespace roughavg {

/// Map on the spectral space with values in H^K (an N x K matrix) and an
/// optional directional derivative DG(x)[v], also N x K.
struct SpectralMap {
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> value;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> derivative;

  [[nodiscard]] bool has_derivative() const noexcept { return static_cast<bool>(derivative); }
};

/// Path Y with values in H^K and Gubinelli derivative Y' with values in
/// H^{K x D}, stored as N x (K*D) where column k*D + j is dY^k/dX^j.
class ControlledPath {
 public:
  ControlledPath(TimeGrid grid, std::size_t driver_dim, double alpha, std::vector<Eigen::MatrixXd> y,
                 std::vector<Eigen::MatrixXd> yp);

  /// Vector-valued path (K = 1).
  static ControlledPath from_vectors(TimeGrid grid, std::size_t driver_dim, double alpha,
                                     const std::vector<Eigen::VectorXd>& y, std::vector<Eigen::MatrixXd> yp);

  [[nodiscard]] const TimeGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t modes() const noexcept { return modes_; }
  [[nodiscard]] std::size_t columns() const noexcept { return columns_; }
  [[nodiscard]] std::size_t driver_dim() const noexcept { return driver_dim_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }

  [[nodiscard]] const Eigen::MatrixXd& value(std::size_t i) const { return y_[i]; }
  [[nodiscard]] const Eigen::MatrixXd& derivative(std::size_t i) const { return yp_[i]; }

 private:
  TimeGrid grid_;
  std::size_t driver_dim_;
  std::size_t modes_;
  std::size_t columns_;
  double alpha_;
  std::vector<Eigen::MatrixXd> y_;
  std::vector<Eigen::MatrixXd> yp_;
};

/// f_t - S_{t-s} f_s for grid indices s <= t.
[[nodiscard]] SpectralVector reduced_increment(const std::vector<SpectralVector>& f, const TimeGrid& grid,
                                               std::size_t s, std::size_t t, const Generator& gen);
[[nodiscard]] Eigen::MatrixXd reduced_increment(const std::vector<Eigen::MatrixXd>& f, const TimeGrid& grid,
                                                std::size_t s, std::size_t t, const Generator& gen);

/// Y' applied to a driver increment: column k is sum_j Y'^{(k,j)} v_j.
[[nodiscard]] Eigen::MatrixXd apply_derivative(const Eigen::MatrixXd& yp, std::size_t columns,
                                               const Eigen::Ref<const Eigen::VectorXd>& v);

/// R^Y_{t,s} = Y_t - S_{t-s} Y_s - S_{t-s} Y'_s delta X_{t,s}.
[[nodiscard]] Eigen::MatrixXd controlled_remainder(const ControlledPath& cp, const RoughPath& x, std::size_t s,
                                                   std::size_t t, const Generator& gen);

struct ControlledNorms {
  double derivative_holder = 0.0;  ///< ||Y'||_{gamma,alpha}
  double remainder_holder = 0.0;   ///< |R^Y|_{2 gamma, alpha}
  double combined = 0.0;           ///< sum of the two

  double path_holder = 0.0;     ///< ||Y||_{gamma,alpha} via reduced increments
  double derivative_sup = 0.0;  ///< ||Y'||_{infty,alpha}
  double driver_holder = 0.0;   ///< |X|_gamma on the same pairs
  double area_holder = 0.0;     ///< |X^2|_{2 gamma} on the same pairs
  /// |R^Y|_{2 gamma} T^gamma + ||Y'||_infty |X|_gamma, which bounds path_holder.
  double path_bound = 0.0;
  bool exhaustive = true;
};

/// Discrete sups over grid pairs at least one grid step apart.
[[nodiscard]] ControlledNorms controlled_seminorm(const ControlledPath& cp, const RoughPath& x, double gamma,
                                                  double alpha, const Generator& gen);

/// One-step germ S_{t-s}(Y_s delta X_{t,s} + Y'_s X^2_{t,s}) for K = D.
[[nodiscard]] Eigen::VectorXd convolution_germ(const RoughPath& x, const ControlledPath& cp, std::size_t s,
                                               std::size_t t, const Generator& gen);

/// Compensated sum of one-step germs over the stored grid between s < t.
[[nodiscard]] Eigen::VectorXd rough_convolution(const RoughPath& x, const ControlledPath& cp, std::size_t s,
                                                std::size_t t, const Generator& gen);

/// Z_t = int_0^t S_{t-u} Y_u dX_u at every grid point, in one pass.
[[nodiscard]] std::vector<Eigen::VectorXd> rough_convolution_path(const RoughPath& x, const ControlledPath& cp,
                                                                  const Generator& gen);

/// ||germ(u,v) - germ(w,v) - S_{v-w} germ(u,w)||_alpha for u < w < v.
[[nodiscard]] double sewing_defect(const RoughPath& x, const ControlledPath& cp, std::size_t u, std::size_t w,
                                   std::size_t v, double alpha, const Generator& gen);

/// |X|_gamma |R^Y|_{2 gamma} + |X^2|_{2 gamma} ||Y'||_gamma, the data factor
/// of the local integral bound; the sewing defect is at most this times
/// |v - u|^{3 gamma}.
[[nodiscard]] double sewing_constant(const ControlledNorms& norms) noexcept;

/// sup over grid pairs of ||int_s^t - germ(s,t)||_alpha / |t-s|^{3 gamma},
/// divided by sewing_constant (0 when the constant vanishes).
[[nodiscard]] double measured_intbound_constant(const RoughPath& x, const ControlledPath& cp, double gamma,
                                                double alpha, const Generator& gen);

/// (G(Y), DG(Y) o Y') for a vector-valued controlled path (K = 1).
[[nodiscard]] ControlledPath compose_function(const SpectralMap& g, const ControlledPath& cp);

}  // namespace roughavg
