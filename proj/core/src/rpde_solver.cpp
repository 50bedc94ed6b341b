#include "roughavg/rpde_solver.hpp"

#include <cmath>
#include <string>

#include "roughavg/error.hpp"

namespace roughavg {

H4Check verify_h4(const CoefficientSet& c, const Generator& gen) {
  H4Check out;
  out.margin = gen.smallest() - c.lip_f2 - 3.0 * c.lip_g2 * c.lip_g2;
  out.pass = out.margin > 0.0;
  return out;
}

StepNoise step_noise(const RoughPath& xi, std::size_t d, std::size_t i) {
  require(d < xi.dim(), ErrorKind::invalid_input, "mixed lift has no fast components");
  require(i < xi.steps(), ErrorKind::invalid_index, "step index out of range");
  const auto dd = static_cast<Eigen::Index>(d);
  const auto m = static_cast<Eigen::Index>(xi.dim() - d);
  const Vec inc = xi.increment(i, i + 1);
  const auto blk = xi.block(i);
  return {inc.head(dd), inc.tail(m), blk.topLeftCorner(dd, dd), blk.bottomRightCorner(m, m),
          blk.topRightCorner(dd, m)};
}

namespace {

void check_state(const Vec& x, const Vec& y, std::size_t step) {
  if (!x.allFinite() || !y.allFinite())
    fail(ErrorKind::blow_up, "non-finite state at step " + std::to_string(step));
}

void check_f1_bound(const CoefficientSet& c, const Vec& f1) {
  if (std::isfinite(c.f1_sup) && f1.norm() > c.f1_sup * (1.0 + 1e-12))
    fail(ErrorKind::invalid_input, "F1 exceeds its declared bound " + std::to_string(c.f1_sup));
}

// Sum over (i, k) of DG[G^i] column k times area(i, k).
Vec second_order(const std::function<Mat(const Vec&)>& directional, const Mat& directions, const Mat& area) {
  Vec out = Vec::Zero(directions.rows());
  for (Eigen::Index i = 0; i < directions.cols(); ++i) {
    if (area.row(i).isZero(0.0)) continue;
    const Mat dir = directional(directions.col(i));
    out.noalias() += dir * area.row(i).transpose();
  }
  return out;
}

struct Stepper {
  const CoefficientSet& c;
  const Generator& gen;
  double eps;

  void operator()(Vec& x, Vec& y, const StepNoise& noise, double h, std::size_t step) const {
    const Mat g1 = c.g1(x);
    const Mat g2 = c.g2(x, y);
    const Vec f1 = c.f1(x, y);
    check_f1_bound(c, f1);

    Vec xn = x + h * f1 + g1 * noise.db;
    xn += second_order([&](const Vec& v) { return c.dg1(x, v); }, g1, noise.bb);

    const double inv_sqrt = 1.0 / std::sqrt(eps);
    Vec yn = y + (h / eps) * c.f2(x, y) + inv_sqrt * (g2 * noise.dw);
    yn += (1.0 / eps) * second_order([&](const Vec& v) { return c.dyg2(x, y, v); }, g2, noise.ww);
    yn += inv_sqrt * second_order([&](const Vec& v) { return c.dxg2(x, y, v); }, g1, noise.bw);

    xn.array() *= gen.decay(h);
    yn.array() *= gen.decay(h / eps);
    check_state(xn, yn, step);
    x = std::move(xn);
    y = std::move(yn);
  }
};

void check_setup(const CoefficientSet& c, const Generator& gen, double eps) {
  const H4Check h4 = verify_h4(c, gen);
  require(h4.pass, ErrorKind::configuration, "coefficients violate the spectral gap condition (margin " +
                                                 std::to_string(h4.margin) + ")");
  require(eps > 0.0 && std::isfinite(eps), ErrorKind::invalid_input, "epsilon must be positive");
  require(gen.modes() == c.modes, ErrorKind::configuration, "generator and coefficients use different mode counts");
}

}  // namespace

SlowFastState step_slow_fast(const SlowFastState& state, const CoefficientSet& c, const Generator& gen,
                             const StepNoise& noise, double eps, double h) {
  check_setup(c, gen, eps);
  require(h > 0.0, ErrorKind::invalid_input, "step must be positive");
  Vec x = state.x.coeffs();
  Vec y = state.y.coeffs();
  Stepper{c, gen, eps}(x, y, noise, h, 0);
  return {SpectralVector(std::move(x)), SpectralVector(std::move(y)), state.t + h};
}

SlowFastPath solve_slow_fast(const Vec& x0, const Vec& y0, const CoefficientSet& c, const Generator& gen,
                             const RoughPath& xi, double eps) {
  check_setup(c, gen, eps);
  require(xi.dim() == c.d + c.m, ErrorKind::invalid_input, "mixed lift dimension does not match d + m");
  const auto n = static_cast<Eigen::Index>(c.modes);
  require(x0.size() == n && y0.size() == n, ErrorKind::invalid_input, "initial state has the wrong size");
  SlowFastPath out;
  out.grid = xi.grid();
  out.x.reserve(xi.steps() + 1);
  out.y.reserve(xi.steps() + 1);
  Vec x = x0;
  Vec y = y0;
  check_state(x, y, 0);
  out.x.push_back(x);
  out.y.push_back(y);
  const Stepper step{c, gen, eps};
  for (std::size_t i = 0; i < xi.steps(); ++i) {
    step(x, y, step_noise(xi, c.d, i), xi.grid().dt(i), i + 1);
    out.x.push_back(x);
    out.y.push_back(y);
  }
  return out;
}

ControlledPath slow_controlled(const std::vector<Vec>& x, const TimeGrid& grid, const CoefficientSet& c) {
  std::vector<Mat> yp;
  yp.reserve(x.size());
  for (const Vec& v : x) yp.push_back(c.g1(v));
  return ControlledPath::from_vectors(grid, c.d, 0.0, x, std::move(yp));
}

std::vector<Vec> solve_fast_ito(const std::vector<Vec>& x_path, const Vec& y0, const CoefficientSet& c,
                                const Generator& gen, const RoughPath& driver, std::size_t w_offset, double eps) {
  check_setup(c, gen, eps);
  require(w_offset + c.m <= driver.dim(), ErrorKind::invalid_input, "driver has too few components for W");
  require(x_path.size() == 1 || x_path.size() == driver.grid().points(), ErrorKind::invalid_input,
          "slow path must be frozen or given at every grid point");
  const auto m = static_cast<Eigen::Index>(c.m);
  const auto offset = static_cast<Eigen::Index>(w_offset);
  const double inv_sqrt = 1.0 / std::sqrt(eps);
  std::vector<Vec> out;
  out.reserve(driver.steps() + 1);
  Vec y = y0;
  out.push_back(y);
  for (std::size_t i = 0; i < driver.steps(); ++i) {
    const Vec& x = x_path.size() == 1 ? x_path.front() : x_path[i];
    const double h = driver.grid().dt(i);
    const Vec dw = driver.increment(i, i + 1).segment(offset, m);
    Vec yn = y + (h / eps) * c.f2(x, y) + inv_sqrt * (c.g2(x, y) * dw);
    yn.array() *= gen.decay(h / eps);
    check_state(x, yn, i + 1);
    y = std::move(yn);
    out.push_back(y);
  }
  return out;
}

}  // namespace roughavg
