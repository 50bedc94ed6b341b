#include "roughavg/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "roughavg/error.hpp"
#include "roughavg/pairs.hpp"
#include "roughavg/rng.hpp"
#include "roughavg/rpde_solver.hpp"
#include "parallel.hpp"

namespace roughavg {

namespace {

void check_frozen_setup(const CoefficientSet& c, const Generator& gen, double horizon, double h) {
  const H4Check h4 = verify_h4(c, gen);
  require(h4.pass, ErrorKind::configuration, "coefficients violate the spectral gap condition");
  require(gen.modes() == c.modes, ErrorKind::configuration, "generator and coefficients use different mode counts");
  require(h > 0.0 && horizon > 0.0 && std::isfinite(horizon), ErrorKind::invalid_input,
          "frozen solve needs a positive horizon and step");
}

std::size_t frozen_steps(double horizon, double h) {
  return static_cast<std::size_t>(std::ceil(horizon / h * (1.0 - 1e-12)));
}

// Advances y by one exponential Euler step of length dt using normals z.
void frozen_step(const Vec& x, Vec& y, const CoefficientSet& c, const Generator& gen, double dt, const Vec& z) {
  Vec yn = y + dt * c.f2(x, y) + std::sqrt(dt) * (c.g2(x, y) * z);
  yn.array() *= gen.decay(dt);
  if (!yn.allFinite()) fail(ErrorKind::blow_up, "non-finite frozen state");
  y = std::move(yn);
}

template <class Visit>
void frozen_run(const Vec& x, const Vec& y0, const CoefficientSet& c, const Generator& gen, double horizon, double h,
                std::uint64_t seed, std::uint32_t sample, Visit&& visit) {
  check_frozen_setup(c, gen, horizon, h);
  const CounterRng rng(seed);
  const std::size_t steps = frozen_steps(horizon, h);
  const auto m = static_cast<Eigen::Index>(c.m);
  Vec z(m);
  Vec y = y0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double dt = std::min(h, horizon - static_cast<double>(k) * h);
    for (Eigen::Index j = 0; j < m; ++j) {
      // Normal k of stream j: half k%2 of the Box-Muller pair k/2.
      const auto pair = rng.normal_pair(k / 2, sample, kStreamFrozen + static_cast<std::uint32_t>(j));
      z[j] = k % 2 == 0 ? pair.first : pair.second;
    }
    frozen_step(x, y, c, gen, dt, z);
    visit(k + 1, y);
  }
}

double fit_slope(const std::vector<double>& t, const std::vector<double>& v) {
  double st = 0.0, sv = 0.0, stt = 0.0, stv = 0.0;
  const double n = static_cast<double>(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double lv = std::log(v[k]);
    st += t[k];
    sv += lv;
    stt += t[k] * t[k];
    stv += t[k] * lv;
  }
  return (n * stv - st * sv) / (n * stt - st * st);
}

}  // namespace

std::vector<Vec> frozen_solve(const Vec& x, const Vec& y, const CoefficientSet& c, const Generator& gen,
                              double horizon, double h, std::uint64_t seed, std::uint32_t sample) {
  std::vector<Vec> out{y};
  out.reserve(frozen_steps(horizon, h) + 1);
  frozen_run(x, y, c, gen, horizon, h, seed, sample, [&](std::size_t, const Vec& v) { out.push_back(v); });
  return out;
}

Vec frozen_endpoint(const Vec& x, const Vec& y, const CoefficientSet& c, const Generator& gen, double horizon,
                    double h, std::uint64_t seed, std::uint32_t sample) {
  Vec out = y;
  frozen_run(x, y, c, gen, horizon, h, seed, sample, [&](std::size_t, const Vec& v) { out = v; });
  return out;
}

ErgodicityFit ergodicity_decay(const Vec& x, const Vec& y1, const Vec& y2, const CoefficientSet& c,
                               const Generator& gen, double horizon, double h, std::size_t samples,
                               std::uint64_t seed) {
  require(samples >= 1, ErrorKind::invalid_input, "ergodicity fit needs at least one sample");
  const std::size_t steps = frozen_steps(horizon, h);
  std::vector<std::vector<double>> per_sample(samples, std::vector<double>(steps, 0.0));

  detail::parallel_for(samples, [&](std::size_t s) {
    const auto sample = static_cast<std::uint32_t>(s);
    const std::vector<Vec> a = frozen_solve(x, y1, c, gen, horizon, h, seed, sample);
    const std::vector<Vec> b = frozen_solve(x, y2, c, gen, horizon, h, seed, sample);
    for (std::size_t k = 0; k < steps; ++k) per_sample[s][k] = (a[k + 1] - b[k + 1]).squaredNorm();
  });

  ErgodicityFit fit;
  fit.fit_start = horizon / 10.0;
  fit.times.resize(steps);
  fit.mean_sq.assign(steps, 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    fit.times[k] = std::min(horizon, static_cast<double>(k + 1) * h);
    for (std::size_t s = 0; s < samples; ++s) fit.mean_sq[k] += per_sample[s][k];
    fit.mean_sq[k] /= static_cast<double>(samples);
  }
  std::vector<double> t;
  std::vector<double> v;
  for (std::size_t k = 0; k < steps; ++k) {
    if (fit.times[k] < fit.fit_start || !(fit.mean_sq[k] > 0.0)) continue;
    t.push_back(fit.times[k]);
    v.push_back(fit.mean_sq[k]);
  }
  const bool vanished = std::all_of(fit.mean_sq.begin(), fit.mean_sq.end(), [](double m) { return m == 0.0; });
  if (vanished) {
    fit.slope = -std::numeric_limits<double>::infinity();
  } else {
    require(t.size() >= 2, ErrorKind::invalid_input, "ergodicity fit window has fewer than two points");
    fit.slope = fit_slope(t, v);
  }
  return fit;
}

double ergodicity_rate_bound(const CoefficientSet& c, const Generator& gen) {
  return -(gen.smallest() - c.lip_f2 - c.lip_g2 * c.lip_g2);
}

double min_t_star(double decay_slope) {
  require(decay_slope < 0.0, ErrorKind::configuration, "ergodicity slope must be negative");
  return std::log(1e3) / -decay_slope;
}

AveragedDriftEstimate averaged_drift(const Vec& x, const CoefficientSet& c, const Generator& gen, double t_star,
                                     std::size_t samples, double h, std::uint64_t seed, double decay_slope,
                                     const std::optional<Vec>& y0) {
  require(samples >= 1, ErrorKind::invalid_input, "averaged drift needs at least one sample");
  require(std::exp(decay_slope * t_star) <= 1e-3 * (1.0 + 1e-12), ErrorKind::configuration,
          "t_star " + std::to_string(t_star) + " is too short for ergodicity slope " + std::to_string(decay_slope));
  const auto n = static_cast<Eigen::Index>(c.modes);
  const Vec start = y0.value_or(Vec::Zero(n));
  std::vector<Vec> values(samples);

  detail::parallel_for(samples, [&](std::size_t s) {
    const Vec y = frozen_endpoint(x, start, c, gen, t_star, h, seed, static_cast<std::uint32_t>(s));
    values[s] = c.f1(x, y);
  });

  Vec mean = Vec::Zero(n);
  for (const Vec& v : values) mean += v;
  mean /= static_cast<double>(samples);
  Vec var = Vec::Zero(n);
  for (const Vec& v : values) var.array() += (v - mean).array().square();

  AveragedDriftEstimate out;
  out.x = SpectralVector(x);
  out.value = SpectralVector(mean);
  out.burn_in = t_star;
  out.samples = samples;
  out.stderr = samples > 1 ? std::sqrt(var.sum() / static_cast<double>(samples - 1) / static_cast<double>(samples))
                           : std::numeric_limits<double>::infinity();
  return out;
}

std::vector<Vec> solve_averaged(const Vec& x0, const CoefficientSet& c, const Generator& gen, const RoughPath& b,
                                const DriftOracle& drift) {
  require(b.dim() == c.d, ErrorKind::invalid_input, "slow driver dimension does not match d");
  require(gen.modes() == c.modes && x0.size() == static_cast<Eigen::Index>(c.modes), ErrorKind::invalid_input,
          "averaged solve sizes do not match");
  std::vector<Vec> out;
  out.reserve(b.steps() + 1);
  Vec x = x0;
  out.push_back(x);
  for (std::size_t i = 0; i < b.steps(); ++i) {
    const double h = b.grid().dt(i);
    const Mat g1 = c.g1(x);
    const auto area = b.block(i);
    Vec xn = x + h * drift(x) + g1 * b.increment(i, i + 1);
    for (Eigen::Index a = 0; a < g1.cols(); ++a) xn.noalias() += c.dg1(x, g1.col(a)) * area.row(a).transpose();
    xn.array() *= gen.decay(h);
    if (!xn.allFinite()) fail(ErrorKind::blow_up, "non-finite averaged state at step " + std::to_string(i + 1));
    x = std::move(xn);
    out.push_back(x);
  }
  return out;
}

std::vector<Vec> auxiliary_solve(const std::vector<Vec>& x_path, const Vec& y0, const CoefficientSet& c,
                                 const Generator& gen, const RoughPath& driver, std::size_t w_offset, double eps,
                                 double delta) {
  const TimeGrid& grid = driver.grid();
  require(grid.is_uniform(), ErrorKind::configuration, "auxiliary solve needs a uniform grid");
  require(x_path.size() == grid.points(), ErrorKind::invalid_input, "slow path must be given at every grid point");
  const double ratio = delta / grid.step();
  const double blocks = std::round(ratio);
  require(delta > 0.0 && blocks >= 1.0 && std::abs(ratio - blocks) <= 1e-9 * ratio, ErrorKind::configuration,
          "delta must be a positive multiple of the grid step");
  const auto per_block = static_cast<std::size_t>(blocks);
  std::vector<Vec> lagged(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) lagged[i] = x_path[(i / per_block) * per_block];
  return solve_fast_ito(lagged, y0, c, gen, driver, w_offset, eps);
}

double reduced_holder_error(const std::vector<Vec>& xe, const std::vector<Vec>& xbar, const SemigroupTable& table,
                            double eta) {
  const TimeGrid& grid = table.grid();
  require(xe.size() == grid.points() && xbar.size() == grid.points(), ErrorKind::invalid_input,
          "paths must share the table grid");
  require(eta > 0.0 && eta < 1.0, ErrorKind::invalid_input, "eta must lie in (0, 1)");
  std::vector<Vec> diff(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) diff[i] = xe[i] - xbar[i];
  const double min_gap = grid.step() * (1.0 - 1e-12);
  Vec tmp(diff.front().size());
  double worst = 0.0;
  for (const auto [i, j] : holder_pairs(grid.steps()).pairs) {
    const double gap = grid[j] - grid[i];
    if (gap < min_gap) continue;
    tmp = diff[i];
    table.apply(i, j, tmp);
    worst = std::max(worst, (diff[j] - tmp).norm() / std::pow(gap, eta));
  }
  return worst;
}

double reduced_holder_error(const std::vector<Vec>& xe, const std::vector<Vec>& xbar, const TimeGrid& grid,
                            const Generator& gen, double eta) {
  return reduced_holder_error(xe, xbar, SemigroupTable(gen, grid), eta);
}

double delta_schedule(double eps, double gamma) {
  require(eps > 0.0 && eps <= 1.0, ErrorKind::invalid_input, "epsilon must lie in (0, 1]");
  require(gamma > 1.0 / 3.0 && gamma <= 0.5, ErrorKind::invalid_input, "gamma must lie in (1/3, 1/2]");
  return std::pow(eps, 1.0 / (2.0 * (1.0 + 2.0 * gamma)));
}

double round_up_to_step(double delta, double step) {
  require(delta > 0.0 && step > 0.0, ErrorKind::invalid_input, "delta and step must be positive");
  double k = std::ceil(delta / step * (1.0 - 1e-9));
  k = std::max(k, 1.0);
  return k * step;
}

}  // namespace roughavg
