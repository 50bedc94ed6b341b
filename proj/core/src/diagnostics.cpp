#include "roughavg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "roughavg/averaging.hpp"
#include "roughavg/controlled.hpp"
#include "roughavg/error.hpp"
#include "roughavg/rough_path.hpp"
#include "roughavg/rpde_solver.hpp"
#include "parallel.hpp"

namespace roughavg {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::write(std::ostream& out) const {
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
    out << '\n';
  };
  line(header);
  for (const auto& row : rows) line(row);
}

double DiagReport::metric(const std::string& key) const {
  for (const auto& [k, v] : metrics)
    if (k == key) return v;
  fail(ErrorKind::invalid_input, "report '" + name + "' has no metric '" + key + "'");
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::invalid_input, "slope fit needs two or more points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

struct MeanErr {
  double mean = 0.0;
  double stderr = 0.0;
};

MeanErr mean_stderr(const std::vector<double>& v) {
  MeanErr out;
  if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return out;
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.stderr = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return out;
}

std::string fmt_size(std::size_t v) { return std::to_string(v); }

struct ChenCase {
  std::string label;
  LiftKind kind;
  double hurst;
  bool mixed;
};

}  // namespace

DiagReport chen_study(const ChenStudy& p) {
  std::vector<ChenCase> cases = {{"brownian_ito", LiftKind::brownian_ito, 0.5, false},
                                 {"brownian_strat", LiftKind::brownian_strat, 0.5, false}};
  for (double h : p.hursts) cases.push_back({"fbm", LiftKind::fbm, h, false});
  cases.push_back({"mixed", LiftKind::fbm, 0.45, true});

  const TimeGrid grid = TimeGrid::uniform(1.0, p.steps);
  const std::size_t total = cases.size() * p.seeds;
  std::vector<double> residual(total);
  detail::parallel_for(total, [&](std::size_t job) {
    const ChenCase& cc = cases[job / p.seeds];
    const std::size_t s = job % p.seeds;
    LiftSpec spec;
    spec.kind = cc.kind;
    spec.hurst = cc.hurst;
    spec.fine_factor = p.fine_factor;
    spec.seed = mix_seed(p.seed, s);
    spec.gamma = cc.kind == LiftKind::fbm ? std::min(0.4, cc.hurst - 0.005) : 0.4;
    if (cc.mixed) {
      LiftSpec fast = spec;
      fast.kind = LiftKind::brownian_ito;
      fast.gamma = 0.4;
      const FineSampler slow_sampler(spec, grid, p.dim, kStreamSlowDriver);
      const FineSampler fast_sampler(fast, grid, p.dim, kStreamFastDriver);
      residual[job] = chen_residual(sample_mixed(slow_sampler, fast_sampler, 0).xi);
    } else if (cc.kind == LiftKind::fbm) {
      residual[job] = chen_residual(lift_fbm(spec, grid, p.dim));
    } else {
      residual[job] = chen_residual(lift_brownian(spec, grid, p.dim));
    }
  });

  DiagReport r;
  r.name = "chen";
  r.table.header = {"kind", "hurst", "seed_index", "residual"};
  double worst = 0.0;
  for (std::size_t job = 0; job < total; ++job) {
    const ChenCase& cc = cases[job / p.seeds];
    r.table.rows.push_back({cc.label, format_real(cc.hurst), fmt_size(job % p.seeds), format_real(residual[job])});
    worst = std::max(worst, residual[job]);
  }
  r.add_metric("max_residual", worst);
  r.add_metric("paths", static_cast<double>(total));
  r.pass = worst <= 1e-12;
  return r;
}

DiagReport ito_symmetry_study(const ItoSymmetryStudy& p) {
  const TimeGrid grid = TimeGrid::uniform(1.0, p.steps);
  const auto d = static_cast<Eigen::Index>(p.dim);
  DiagReport r;
  r.name = "ito-symmetry";
  r.table.header = {"fine_factor", "mean_sq_defect", "stderr", "ratio"};
  r.pass = true;
  double previous = 0.0;
  for (std::size_t f : p.fine_factors) {
    LiftSpec spec;
    spec.kind = LiftKind::brownian_ito;
    spec.fine_factor = f;
    spec.seed = p.seed;
    std::vector<double> per_sample(p.samples);
    detail::parallel_for(p.samples, [&](std::size_t s) {
      const RoughPath w = lift_brownian(spec, grid, p.dim, static_cast<std::uint32_t>(s));
      double acc = 0.0;
      for (std::size_t i = 0; i < w.steps(); ++i) {
        const Eigen::VectorXd dw = w.increment(i, i + 1);
        RowMatrix defect = w.block(i) + w.block(i).transpose();
        defect.noalias() -= dw * dw.transpose();
        defect += grid.dt(i) * RowMatrix::Identity(d, d);
        acc += defect.squaredNorm();
      }
      per_sample[s] = acc / static_cast<double>(w.steps());
    });
    const MeanErr me = mean_stderr(per_sample);
    const double ratio = previous > 0.0 ? me.mean / previous : std::numeric_limits<double>::quiet_NaN();
    if (previous > 0.0) {
      r.add_metric("ratio_" + std::to_string(f), ratio);
      r.pass = r.pass && ratio >= 0.4 && ratio <= 0.6;
    }
    r.table.rows.push_back({fmt_size(f), format_real(me.mean), format_real(me.stderr), format_real(ratio)});
    r.add_metric("defect_" + std::to_string(f), me.mean);
    previous = me.mean;
  }
  return r;
}

namespace {

ControlledPath trig_integrand(const RoughPath& x, std::size_t modes) {
  const auto n = static_cast<Eigen::Index>(modes);
  const auto d = static_cast<Eigen::Index>(x.dim());
  std::vector<Eigen::MatrixXd> y(x.grid().points());
  std::vector<Eigen::MatrixXd> yp(x.grid().points());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto v = x.value(i);
    y[i] = Eigen::MatrixXd::Zero(n, d);
    yp[i] = Eigen::MatrixXd::Zero(n, d * d);
    for (Eigen::Index k = 0; k < d; ++k) {
      y[i](k, k) = std::sin(1.0 + v[k]);
      yp[i](k, k * d + k) = std::cos(1.0 + v[k]);
    }
  }
  return ControlledPath(x.grid(), x.dim(), 0.0, std::move(y), std::move(yp));
}

}  // namespace

DiagReport sewing_rate_study(const SewingRateStudy& p, const Generator& gen) {
  require(gen.modes() >= p.dim, ErrorKind::invalid_input, "sewing study needs at least dim modes");
  const std::size_t finest = *std::max_element(p.steps.begin(), p.steps.end());
  const std::size_t fine = finest * p.refine * p.reference_fine;
  const std::size_t levels = p.steps.size();
  std::vector<std::vector<double>> err(levels, std::vector<double>(p.samples));

  detail::parallel_for(levels * p.samples, [&](std::size_t job) {
    const std::size_t level = job / p.samples;
    const auto sample = static_cast<std::uint32_t>(job % p.samples);
    const std::size_t n = p.steps[level];
    LiftSpec spec;
    spec.kind = LiftKind::brownian_ito;
    spec.seed = p.seed;
    spec.gamma = p.gamma;
    spec.fine_factor = fine / n;
    const RoughPath coarse = lift_brownian(spec, TimeGrid::uniform(1.0, n), p.dim, sample);
    spec.fine_factor = fine / (n * p.refine);
    const RoughPath ref = lift_brownian(spec, TimeGrid::uniform(1.0, n * p.refine), p.dim, sample);
    const Eigen::VectorXd a = rough_convolution(coarse, trig_integrand(coarse, gen.modes()), 0, n, gen);
    const Eigen::VectorXd b = rough_convolution(ref, trig_integrand(ref, gen.modes()), 0, n * p.refine, gen);
    err[level][sample] = (a - b).norm();
  });

  DiagReport r;
  r.name = "sewing-rate";
  r.table.header = {"steps", "h", "mean_error", "stderr"};
  std::vector<double> hs;
  std::vector<double> means;
  for (std::size_t level = 0; level < levels; ++level) {
    const MeanErr me = mean_stderr(err[level]);
    const double h = 1.0 / static_cast<double>(p.steps[level]);
    hs.push_back(h);
    means.push_back(me.mean);
    r.table.rows.push_back({fmt_size(p.steps[level]), format_real(h), format_real(me.mean), format_real(me.stderr)});
  }
  const double slope = loglog_slope(hs, means);
  r.add_metric("slope", slope);
  r.add_metric("theory", 3.0 * p.gamma - 1.0);
  r.pass = slope >= 0.15;
  return r;
}

DiagReport convolution_smooth_study(const ConvolutionSmoothStudy& p, const Generator& gen) {
  const double lambda = gen.eigenvalue(0);
  const double exact = lambda > 0.0 ? p.constant * (1.0 - std::exp(-lambda * p.span)) / lambda : p.constant * p.span;
  const auto n_modes = static_cast<Eigen::Index>(gen.modes());
  DiagReport r;
  r.name = "convolution-smooth";
  r.table.header = {"steps", "value", "closed_form", "error"};
  std::vector<double> hs;
  std::vector<double> errs;
  for (std::size_t n : p.steps) {
    const TimeGrid grid = TimeGrid::uniform(p.span, n);
    const RoughPath x = lift_smooth(
        grid, 1, 0.4, [](double t) { return Eigen::VectorXd::Constant(1, t); },
        [](double s, double t) { return Eigen::MatrixXd::Constant(1, 1, 0.5 * (t - s) * (t - s)); });
    std::vector<Eigen::MatrixXd> y(grid.points(), Eigen::MatrixXd::Zero(n_modes, 1));
    for (auto& m : y) m(0, 0) = p.constant;
    std::vector<Eigen::MatrixXd> yp(grid.points(), Eigen::MatrixXd::Zero(n_modes, 1));
    const ControlledPath cp(grid, 1, 0.0, std::move(y), std::move(yp));
    const Eigen::VectorXd v = rough_convolution(x, cp, 0, n, gen);
    Eigen::VectorXd target = Eigen::VectorXd::Zero(n_modes);
    target[0] = exact;
    const double e = (v - target).norm();
    hs.push_back(p.span / static_cast<double>(n));
    errs.push_back(e);
    r.table.rows.push_back({fmt_size(n), format_real(v[0]), format_real(exact), format_real(e)});
  }
  r.add_metric("final_error", errs.back());
  r.add_metric("order", errs.size() >= 2 && errs.back() > 0.0 ? loglog_slope(hs, errs) : 0.0);
  r.pass = errs.back() <= 1e-6;
  return r;
}

DiagReport ergodicity_study(const ErgodicityStudy& p, const CoefficientSet& c, const Generator& gen) {
  const auto n = static_cast<Eigen::Index>(c.modes);
  const Vec zero = Vec::Zero(n);
  const ErgodicityFit fit = ergodicity_decay(zero, zero, Vec::Ones(n), c, gen, p.horizon, p.step, p.samples, p.seed);
  DiagReport r;
  r.name = "ergodicity";
  r.table.header = {"t", "mean_sq_difference"};
  const std::size_t stride = std::max<std::size_t>(1, fit.times.size() / 200);
  for (std::size_t k = 0; k < fit.times.size(); k += stride)
    r.table.rows.push_back({format_real(fit.times[k]), format_real(fit.mean_sq[k])});
  const double bound = ergodicity_rate_bound(c, gen);
  r.add_metric("slope", fit.slope);
  r.add_metric("bound", bound);
  r.pass = fit.slope <= bound;
  if (c.name == "dissipative-ou") {
    const double expected = -2.0 * (gen.smallest() + c.lip_f2);
    r.add_metric("expected", expected);
    r.pass = r.pass && std::abs(fit.slope / expected - 1.0) <= 0.2;
  }
  return r;
}

DiagReport frozen_oracle_study(const FrozenOracleStudy& p, const CoefficientSet& c, const Generator& gen) {
  require(static_cast<bool>(c.averaged_drift), ErrorKind::unsupported_coefficient,
          "coefficient set '" + c.name + "' has no closed-form averaged drift");
  const auto n = static_cast<Eigen::Index>(c.modes);
  const Vec zero = Vec::Zero(n);
  const double slope = ergodicity_decay(zero, zero, Vec::Ones(n), c, gen, 10.0, 0.01, 64, p.seed).slope;
  const CounterRng rng(p.seed);
  DiagReport r;
  r.name = "frozen-oracle";
  r.table.header = {"point", "distance", "stderr", "ratio"};
  r.pass = true;
  double worst_ratio = 0.0;
  double worst_stderr = 0.0;
  std::vector<double> z(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < p.points; ++j) {
    rng.fill_normal(static_cast<std::uint32_t>(j), kStreamPairs + 2, 0, z);
    Vec x(n);
    for (Eigen::Index k = 0; k < n; ++k) x[k] = z[static_cast<std::size_t>(k)] / static_cast<double>(k + 1);
    const AveragedDriftEstimate est =
        averaged_drift(x, c, gen, p.t_star, p.samples, p.step, mix_seed(p.seed, "frozen"), slope);
    const double dist = (est.value.coeffs() - c.averaged_drift(x, gen)).norm();
    const double ratio = dist / est.stderr;
    worst_ratio = std::max(worst_ratio, ratio);
    worst_stderr = std::max(worst_stderr, est.stderr);
    r.table.rows.push_back({fmt_size(j), format_real(dist), format_real(est.stderr), format_real(ratio)});
  }
  r.add_metric("max_ratio", worst_ratio);
  r.add_metric("max_stderr", worst_stderr);
  r.add_metric("slope", slope);
  r.pass = worst_ratio <= 3.0 && worst_stderr <= 1e-2;
  return r;
}

namespace {

struct LevelSamplers {
  FineSampler slow;
  FineSampler fast;
};

LevelSamplers make_samplers(const SolverStudy& s, const CoefficientSet& c, const TimeGrid& grid,
                            std::size_t fine_factor) {
  LiftSpec slow = s.slow;
  slow.fine_factor = fine_factor;
  LiftSpec fast = slow;
  fast.kind = LiftKind::brownian_ito;
  return {FineSampler(slow, grid, c.d, kStreamSlowDriver), FineSampler(fast, grid, c.m, kStreamFastDriver)};
}

}  // namespace

DiagReport fast_consistency_study(const FastConsistencyStudy& p, const SolverStudy& s, const CoefficientSet& c,
                                  const Generator& gen) {
  const std::size_t levels = p.steps.size();
  std::vector<LevelSamplers> samplers;
  for (std::size_t n : p.steps) {
    require(p.fine_steps % n == 0, ErrorKind::invalid_input, "fine steps must be a multiple of every level");
    samplers.push_back(make_samplers(s, c, TimeGrid::uniform(s.horizon, n), p.fine_steps / n));
  }
  std::vector<std::vector<double>> gap(levels, std::vector<double>(s.samples));
  detail::parallel_for(levels * s.samples, [&](std::size_t job) {
    const std::size_t level = job / s.samples;
    const auto sample = static_cast<std::uint32_t>(job % s.samples);
    const RoughPath xi = sample_mixed(samplers[level].slow, samplers[level].fast, sample).xi;
    const SlowFastPath path = solve_slow_fast(s.x0, s.y0, c, gen, xi, s.eps);
    const std::vector<Vec> ito = solve_fast_ito(path.x, s.y0, c, gen, xi, c.d, s.eps);
    double worst = 0.0;
    for (std::size_t i = 0; i < ito.size(); ++i) worst = std::max(worst, (path.y[i] - ito[i]).squaredNorm());
    gap[level][sample] = worst;
  });

  DiagReport r;
  r.name = "fast-consistency";
  r.table.header = {"steps", "h", "mean_sup_sq_gap", "stderr", "paired_change", "paired_stderr"};
  r.pass = true;
  for (std::size_t level = 0; level < levels; ++level) {
    const MeanErr me = mean_stderr(gap[level]);
    MeanErr change{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    if (level > 0) {
      std::vector<double> diff(s.samples);
      for (std::size_t k = 0; k < s.samples; ++k) diff[k] = gap[level][k] - gap[level - 1][k];
      change = mean_stderr(diff);
      r.pass = r.pass && change.mean <= 2.0 * change.stderr;
    }
    r.table.rows.push_back({fmt_size(p.steps[level]), format_real(s.horizon / static_cast<double>(p.steps[level])),
                            format_real(me.mean), format_real(me.stderr), format_real(change.mean),
                            format_real(change.stderr)});
    r.add_metric("gap_" + std::to_string(p.steps[level]), me.mean);
  }
  const double first = mean_stderr(gap.front()).mean;
  const double last = mean_stderr(gap.back()).mean;
  // Additive fast noise makes both schemes the same map; the gap is then
  // roundoff at every level and there is nothing left to decrease.
  bool exact = true;
  for (const auto& level : gap)
    for (double g : level) exact = exact && g <= 1e-24;
  r.add_metric("exact", exact ? 1.0 : 0.0);
  r.add_metric("last_over_first", exact ? 0.0 : last / first);
  r.pass = exact || (r.pass && last < first);
  return r;
}

DiagReport aux_gap_study(const AuxGapStudy& p, const SolverStudy& s, const CoefficientSet& c, const Generator& gen) {
  const TimeGrid grid = TimeGrid::uniform(s.horizon, p.steps);
  const LevelSamplers samplers = make_samplers(s, c, grid, p.fine_factor);
  const std::size_t blocks = p.block_steps.size();
  // fourth[sample][block][point]
  std::vector<std::vector<std::vector<double>>> fourth(s.samples);
  detail::parallel_for(s.samples, [&](std::size_t sample) {
    const RoughPath xi = sample_mixed(samplers.slow, samplers.fast, static_cast<std::uint32_t>(sample)).xi;
    const SlowFastPath path = solve_slow_fast(s.x0, s.y0, c, gen, xi, s.eps);
    const std::vector<Vec> y = solve_fast_ito(path.x, s.y0, c, gen, xi, c.d, s.eps);
    auto& out = fourth[sample];
    out.resize(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      const double delta = static_cast<double>(p.block_steps[b]) * grid.step();
      const std::vector<Vec> aux = auxiliary_solve(path.x, s.y0, c, gen, xi, c.d, s.eps, delta);
      out[b].resize(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double sq = (y[i] - aux[i]).squaredNorm();
        out[b][i] = sq * sq;
      }
    }
  });

  DiagReport r;
  r.name = "aux-gap";
  r.table.header = {"delta", "sup_t_mean_fourth_gap"};
  std::vector<double> deltas;
  std::vector<double> sups;
  for (std::size_t b = 0; b < blocks; ++b) {
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.points(); ++i) {
      double mean = 0.0;
      for (std::size_t k = 0; k < s.samples; ++k) mean += fourth[k][b][i];
      sup = std::max(sup, mean / static_cast<double>(s.samples));
    }
    const double delta = static_cast<double>(p.block_steps[b]) * grid.step();
    deltas.push_back(delta);
    sups.push_back(sup);
    r.table.rows.push_back({format_real(delta), format_real(sup)});
  }
  bool monotone = true;
  for (std::size_t b = 1; b < blocks; ++b) monotone = monotone && sups[b] >= sups[b - 1];
  const double slope = loglog_slope(deltas, sups);
  r.add_metric("slope", slope);
  r.add_metric("required", 2.0 * p.eta);
  r.add_metric("monotone", monotone ? 1.0 : 0.0);
  r.pass = slope >= 2.0 * p.eta;
  return r;
}

DiagReport holder_increment_study(const HolderIncrementStudy& p, const SolverStudy& s, const CoefficientSet& c,
                                  const Generator& gen) {
  const TimeGrid grid = TimeGrid::uniform(s.horizon, p.steps);
  const LevelSamplers samplers = make_samplers(s, c, grid, p.fine_factor);
  std::vector<std::vector<double>> moment(s.samples, std::vector<double>(p.lags.size()));
  detail::parallel_for(s.samples, [&](std::size_t sample) {
    const RoughPath xi = sample_mixed(samplers.slow, samplers.fast, static_cast<std::uint32_t>(sample)).xi;
    const SlowFastPath path = solve_slow_fast(s.x0, s.y0, c, gen, xi, s.eps);
    for (std::size_t l = 0; l < p.lags.size(); ++l) {
      const std::size_t lag = p.lags[l];
      double acc = 0.0;
      for (std::size_t i = 0; i + lag < path.x.size(); ++i) {
        const double sq = (path.x[i + lag] - path.x[i]).squaredNorm();
        acc += sq * sq;
      }
      moment[sample][l] = acc / static_cast<double>(path.x.size() - lag);
    }
  });
  DiagReport r;
  r.name = "holder-increments";
  r.table.header = {"lag", "mean_fourth_increment"};
  std::vector<double> lags;
  std::vector<double> means;
  for (std::size_t l = 0; l < p.lags.size(); ++l) {
    double mean = 0.0;
    for (const auto& m : moment) mean += m[l];
    mean /= static_cast<double>(s.samples);
    const double lag = static_cast<double>(p.lags[l]) * grid.step();
    lags.push_back(lag);
    means.push_back(mean);
    r.table.rows.push_back({format_real(lag), format_real(mean)});
  }
  const double slope = loglog_slope(lags, means);
  r.add_metric("slope", slope);
  r.add_metric("required", 4.0 * p.eta - 0.5);
  r.pass = slope >= 4.0 * p.eta - 0.5;
  return r;
}

}  // namespace roughavg
