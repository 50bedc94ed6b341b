#pragma once

// Closed forms and hand-built coefficient sets used as independent
// references by the unit and acceptance tests.

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "roughavg/coefficients.hpp"
#include "roughavg/grid.hpp"
#include "roughavg/spectral_space.hpp"

namespace oracle {

inline double fbm_covariance(double t, double s, double hurst) {
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(std::abs(t), h2) + std::pow(std::abs(s), h2) - std::pow(std::abs(t - s), h2));
}

/// Cov(X_{b} - X_{a}, X_{d} - X_{c}) for fBm.
inline double fbm_increment_covariance(double a, double b, double c, double d, double hurst) {
  return fbm_covariance(b, d, hurst) - fbm_covariance(b, c, hurst) - fbm_covariance(a, d, hurst) +
         fbm_covariance(a, c, hurst);
}

/// int_0^span e^{-lambda (span - u)} c du.
inline double scalar_convolution(double c, double lambda, double span) {
  return lambda == 0.0 ? c * span : c * (1.0 - std::exp(-lambda * span)) / lambda;
}

/// Iterated integrals of X_u = (u, u^2) over [s, t]: entry (a, b) is the
/// integral of (X^a_u - X^a_s) dX^b_u.
inline Eigen::MatrixXd parabola_area(double s, double t) {
  Eigen::MatrixXd a(2, 2);
  a(0, 0) = 0.5 * (t - s) * (t - s);
  a(0, 1) = 2.0 * (t * t * t - s * s * s) / 3.0 - s * (t * t - s * s);
  a(1, 0) = (t * t * t - s * s * s) / 3.0 - s * s * (t - s);
  a(1, 1) = 0.5 * (t * t - s * s) * (t * t - s * s);
  return a;
}

/// sup over grid gaps k h of (1 - e^{-lambda k h}) / (k h)^eta.
inline double constant_orbit_gap_sup(double lambda, double eta, double h, std::size_t steps) {
  double best = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double gap = static_cast<double>(k) * h;
    best = std::max(best, (1.0 - std::exp(-lambda * gap)) / std::pow(gap, eta));
  }
  return best;
}

/// Every map zero; d slow and m fast noise columns.
inline roughavg::CoefficientSet zero_set(std::size_t modes, std::size_t d, std::size_t m) {
  using roughavg::Mat;
  using roughavg::Vec;
  const auto n = static_cast<Eigen::Index>(modes);
  const auto dd = static_cast<Eigen::Index>(d);
  const auto mm = static_cast<Eigen::Index>(m);
  roughavg::CoefficientSet c;
  c.name = "zero";
  c.modes = modes;
  c.d = d;
  c.m = m;
  c.f1 = [n](const Vec&, const Vec&) { return Vec(Vec::Zero(n)); };
  c.f2 = c.f1;
  c.g1 = [n, dd](const Vec&) { return Mat(Mat::Zero(n, dd)); };
  c.dg1 = [n, dd](const Vec&, const Vec&) { return Mat(Mat::Zero(n, dd)); };
  c.g2 = [n, mm](const Vec&, const Vec&) { return Mat(Mat::Zero(n, mm)); };
  c.dxg2 = [n, mm](const Vec&, const Vec&, const Vec&) { return Mat(Mat::Zero(n, mm)); };
  c.dyg2 = c.dxg2;
  c.averaged_drift = [n](const Vec&, const roughavg::Generator&) { return Vec(Vec::Zero(n)); };
  return c;
}

/// Linear fast equation F2 = -kappa y with additive noise sigma on the first
/// m modes, slow drift F1 = (y_0^3, 0, ...) (odd in y).
inline roughavg::CoefficientSet odd_ou_set(std::size_t modes, double kappa, double sigma, std::size_t m) {
  using roughavg::Mat;
  using roughavg::Vec;
  roughavg::CoefficientSet c = zero_set(modes, 1, m);
  const auto n = static_cast<Eigen::Index>(modes);
  const auto mm = static_cast<Eigen::Index>(m);
  c.name = "odd-ou";
  c.f1 = [n](const Vec&, const Vec& y) {
    Vec out = Vec::Zero(n);
    out[0] = y[0] * y[0] * y[0];
    return out;
  };
  c.f2 = [kappa](const Vec&, const Vec& y) { return Vec(-kappa * y); };
  c.g2 = [n, mm, sigma](const Vec&, const Vec&) {
    Mat out = Mat::Zero(n, mm);
    for (Eigen::Index j = 0; j < mm; ++j) out(j, j) = sigma;
    return out;
  };
  c.lip_f2 = kappa;
  c.averaged_drift = nullptr;
  return c;
}

}  // namespace oracle
