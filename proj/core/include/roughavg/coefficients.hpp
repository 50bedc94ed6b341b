#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "roughavg/controlled.hpp"
#include "roughavg/spectral_space.hpp"

namespace roughavg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Coefficients of the slow-fast system on the N-mode space. G1 has d
/// columns and G2 has m columns; the derivative maps are directional
/// (DG1(x)[v], D_x G2(x,y)[v], D_y G2(x,y)[v]) and return matrices of the
/// same shape as the map itself.
struct CoefficientSet {
  std::string name;
  std::size_t modes = 0;
  std::size_t d = 0;
  std::size_t m = 0;

  std::function<Vec(const Vec&, const Vec&)> f1;
  std::function<Vec(const Vec&, const Vec&)> f2;
  std::function<Mat(const Vec&)> g1;
  std::function<Mat(const Vec&, const Vec&)> dg1;
  std::function<Mat(const Vec&, const Vec&)> g2;
  std::function<Mat(const Vec&, const Vec&, const Vec&)> dxg2;
  std::function<Mat(const Vec&, const Vec&, const Vec&)> dyg2;

  double lip_f2 = 0.0;  ///< Lipschitz constant of F2 in y
  double lip_g2 = 0.0;  ///< Lipschitz constant of G2 in y (Hilbert-Schmidt)
  double f1_sup = std::numeric_limits<double>::infinity();

  /// 0-based modes of x on which the averaged drift depends, and on which
  /// it is supported.
  std::vector<std::size_t> active_modes;
  /// Component n of every map depends on (x_n, y_n) only.
  bool separable = false;
  /// Closed-form averaged drift when known.
  std::function<Vec(const Vec&, const Generator&)> averaged_drift;

  /// G1 packaged as a spectral map for composition with controlled paths.
  [[nodiscard]] SpectralMap g1_map() const;
};

using CoefficientParams = std::map<std::string, double>;

/// "dissipative-ou": F1 = f(x) + P y, F2 = g(x) - kappa y, G2 constant.
/// Parameters: kappa, rank, p, f_scale, g_scale, sigma. F1 is unbounded in y.
[[nodiscard]] CoefficientSet dissipative_ou(std::size_t modes, const CoefficientParams& params = {});

/// "bounded-nemytskii": tanh-saturated componentwise drifts and diffusions.
/// Parameters: a, c, sigma, rank.
[[nodiscard]] CoefficientSet bounded_nemytskii(std::size_t modes, const CoefficientParams& params = {});

/// Built-in set by name; unknown names or parameters give a configuration error.
[[nodiscard]] CoefficientSet make_coefficients(const std::string& name, std::size_t modes,
                                               const CoefficientParams& params = {});

struct LipschitzProbe {
  double f2 = 0.0;      ///< max ||F2(x,y1) - F2(x,y2)|| / ||y1 - y2||
  double g2 = 0.0;      ///< same for G2 in Hilbert-Schmidt norm
  double f1_max = 0.0;  ///< max ||F1(x,y)|| seen
};

/// Random probes near the diagonal y = x (where saturating maps are
/// steepest) and at larger separations.
[[nodiscard]] LipschitzProbe probe_coefficients(const CoefficientSet& c, std::uint64_t seed, std::size_t probes);

}  // namespace roughavg
