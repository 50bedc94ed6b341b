#include "roughavg/experiment.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>

#include "roughavg/drift_table.hpp"
#include "roughavg/error.hpp"
#include "roughavg/lift.hpp"
#include "roughavg/rpde_solver.hpp"
#include "parallel.hpp"

namespace roughavg {

namespace {

// Sets the OpenMP team size for the lifetime of the guard.
class WorkerScope {
 public:
  explicit WorkerScope(std::size_t workers) : saved_(omp_get_max_threads()) {
    omp_set_num_threads(static_cast<int>(workers));
  }
  ~WorkerScope() { omp_set_num_threads(saved_); }
  WorkerScope(const WorkerScope&) = delete;
  WorkerScope& operator=(const WorkerScope&) = delete;

 private:
  int saved_;
};

struct SampleResult {
  std::vector<double> error;  // NaN on blow-up
  std::vector<double> seconds;
};

}  // namespace

SweepReport run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const WorkerScope workers(cfg.workers);
  const Generator gen = cfg.generator();
  const CoefficientSet c = cfg.coefficient_set();
  const TimeGrid grid = cfg.grid();
  const SemigroupTable table(gen, grid);
  const FineSampler slow(cfg.slow_spec(), grid, c.d, kStreamSlowDriver);
  const FineSampler fast(cfg.fast_spec(), grid, c.m, kStreamFastDriver);
  const Vec x0 = cfg.initial_x();
  const Vec y0 = cfg.initial_y();

  SweepReport report;
  DriftOracle oracle;
  std::optional<DriftTable> drift_table;
  const bool closed = cfg.drift_oracle == DriftOracleKind::closed_form ||
                      (cfg.drift_oracle == DriftOracleKind::automatic && static_cast<bool>(c.averaged_drift));
  if (closed) {
    report.drift_source = "closed_form";
    oracle = [&](const Vec& x) { return c.averaged_drift(x, gen); };
  } else {
    DriftTableOptions opts;
    opts.lattice_step = cfg.drift_lattice_step;
    opts.samples = cfg.drift_samples;
    opts.t_star = cfg.drift_t_star;
    opts.step = cfg.drift_step;
    opts.seed = mix_seed(cfg.seed, "drift");
    drift_table.emplace(c, gen, opts);
    report.drift_source = "table";
    oracle = [&](const Vec& x) { return (*drift_table)(x); };
  }

  const std::size_t n_eps = cfg.epsilons.size();
  std::vector<SampleResult> results(cfg.samples);
  using Clock = std::chrono::steady_clock;
  detail::parallel_for(cfg.samples, [&](std::size_t s) {
    SampleResult& out = results[s];
    out.error.assign(n_eps, std::numeric_limits<double>::quiet_NaN());
    out.seconds.assign(n_eps, 0.0);
    const MixedSample lift = sample_mixed(slow, fast, static_cast<std::uint32_t>(s));
    std::vector<Vec> xbar;
    try {
      xbar = solve_averaged(x0, c, gen, lift.slow, oracle);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::blow_up) throw;
      return;
    }
    for (std::size_t k = 0; k < n_eps; ++k) {
      const auto start = Clock::now();
      try {
        const SlowFastPath path = solve_slow_fast(x0, y0, c, gen, lift.xi, cfg.epsilons[k]);
        const double e = reduced_holder_error(path.x, xbar, table, cfg.eta);
        out.error[k] = e * e;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::blow_up) throw;
      }
      out.seconds[k] = std::chrono::duration<double>(Clock::now() - start).count();
    }
  });

  for (std::size_t k = 0; k < n_eps; ++k) {
    SweepRow row;
    row.epsilon = cfg.epsilons[k];
    const double raw_delta = cfg.deltas.empty() ? delta_schedule(row.epsilon, cfg.gamma) : cfg.deltas[k];
    row.delta = round_up_to_step(raw_delta, grid.step());
    std::vector<double> ok;
    for (const SampleResult& r : results) {
      row.seconds += r.seconds[k];
      if (std::isnan(r.error[k])) {
        ++row.blowups;
      } else {
        ok.push_back(r.error[k]);
      }
    }
    row.mean = std::numeric_limits<double>::quiet_NaN();
    row.stderr = std::numeric_limits<double>::quiet_NaN();
    if (!ok.empty()) {
      row.mean = 0.0;
      for (double v : ok) row.mean += v;
      row.mean /= static_cast<double>(ok.size());
      double ss = 0.0;
      for (double v : ok) ss += (v - row.mean) * (v - row.mean);
      row.stderr = ok.size() > 1 ? std::sqrt(ss / static_cast<double>(ok.size() - 1) / static_cast<double>(ok.size()))
                                 : 0.0;
    }
    report.rows.push_back(row);
  }

  // Successive epsilons share every sample, so the comparison uses paired
  // differences over samples that survived both solves.
  report.nonincreasing = true;
  for (std::size_t k = 1; k < n_eps; ++k) {
    std::vector<double> diff;
    for (const SampleResult& r : results)
      if (!std::isnan(r.error[k]) && !std::isnan(r.error[k - 1])) diff.push_back(r.error[k] - r.error[k - 1]);
    if (diff.size() < 2) {
      report.nonincreasing = false;
      continue;
    }
    double mean = 0.0;
    for (double v : diff) mean += v;
    mean /= static_cast<double>(diff.size());
    double ss = 0.0;
    for (double v : diff) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / static_cast<double>(diff.size() - 1) / static_cast<double>(diff.size()));
    report.nonincreasing = report.nonincreasing && mean <= 2.0 * se;
  }
  report.final_over_initial = report.rows.back().mean / report.rows.front().mean;
  report.pass = report.nonincreasing && report.final_over_initial <= 0.25;
  if (drift_table) {
    report.drift_stderr = drift_table->max_stderr();
    report.drift_quantization = drift_table->quantization_error();
    report.drift_nodes = drift_table->nodes();
  }
  return report;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report, bool timing) {
  CsvTable t;
  t.header = {"epsilon", "delta", "mc_mean_sq_error", "mc_stderr", "blowups", "seconds"};
  for (const SweepRow& r : report.rows)
    t.rows.push_back({format_real(r.epsilon), format_real(r.delta), format_real(r.mean), format_real(r.stderr),
                      std::to_string(r.blowups), format_real(timing ? r.seconds : 0.0)});
  t.write(out);
}

const std::vector<std::string>& diag_names() {
  static const std::vector<std::string> names = {"chen",       "ito-symmetry",      "sewing-rate",
                                                 "ergodicity", "frozen-oracle",     "aux-gap",
                                                 "holder-increments", "fast-consistency", "convolution-smooth"};
  return names;
}

namespace {

SolverStudy solver_study(const ExperimentConfig& cfg) {
  SolverStudy s;
  s.slow = cfg.slow_spec();
  s.eps = cfg.diag_double("eps", 1e-2);
  s.horizon = cfg.horizon;
  s.samples = cfg.diag_size("samples", cfg.samples);
  s.x0 = cfg.initial_x();
  s.y0 = cfg.initial_y();
  return s;
}

}  // namespace

DiagReport run_diag(const ExperimentConfig& cfg, const std::string& name) {
  bool known = false;
  for (const auto& n : diag_names()) known = known || n == name;
  require(known, ErrorKind::usage, "unknown diagnostic '" + name + "'");
  cfg.validate();
  const WorkerScope workers(cfg.workers);
  const Generator gen = cfg.generator();
  const CoefficientSet c = cfg.coefficient_set();

  if (name == "chen") {
    ChenStudy p;
    p.seeds = cfg.diag_size("seeds", p.seeds);
    p.steps = cfg.diag_size("steps", p.steps);
    p.fine_factor = cfg.diag_size("fine_factor", p.fine_factor);
    p.seed = mix_seed(cfg.seed, "chen");
    return chen_study(p);
  }
  if (name == "ito-symmetry") {
    ItoSymmetryStudy p;
    p.samples = cfg.diag_size("samples", p.samples);
    p.seed = mix_seed(cfg.seed, "ito-symmetry");
    return ito_symmetry_study(p);
  }
  if (name == "sewing-rate") {
    SewingRateStudy p;
    p.samples = cfg.diag_size("samples", p.samples);
    p.gamma = cfg.gamma;
    p.seed = mix_seed(cfg.seed, "sewing-rate");
    return sewing_rate_study(p, gen);
  }
  if (name == "convolution-smooth") {
    ConvolutionSmoothStudy p;
    p.span = cfg.diag_double("span", p.span);
    return convolution_smooth_study(p, gen);
  }
  if (name == "ergodicity") {
    ErgodicityStudy p;
    p.samples = cfg.diag_size("samples", p.samples);
    p.horizon = cfg.diag_double("horizon", p.horizon);
    p.step = cfg.frozen_step;
    p.seed = mix_seed(cfg.seed, "ergodicity");
    return ergodicity_study(p, c, gen);
  }
  if (name == "frozen-oracle") {
    FrozenOracleStudy p;
    p.samples = cfg.frozen_samples;
    p.t_star = cfg.t_star;
    p.step = cfg.frozen_step;
    p.seed = mix_seed(cfg.seed, "frozen-oracle");
    return frozen_oracle_study(p, c, gen);
  }
  SolverStudy s = solver_study(cfg);
  if (name == "fast-consistency") {
    FastConsistencyStudy p;
    return fast_consistency_study(p, s, c, gen);
  }
  if (name == "aux-gap") {
    AuxGapStudy p;
    p.steps = cfg.diag_size("steps", p.steps);
    p.eta = cfg.eta;
    return aux_gap_study(p, s, c, gen);
  }
  HolderIncrementStudy p;
  p.steps = cfg.diag_size("steps", p.steps);
  p.eta = cfg.eta;
  return holder_increment_study(p, s, c, gen);
}

RoughPath lift_from_config(const ExperimentConfig& cfg, std::uint32_t sample) {
  cfg.validate();
  const CoefficientSet c = cfg.coefficient_set();
  const TimeGrid grid = cfg.grid();
  const FineSampler slow(cfg.slow_spec(), grid, c.d, kStreamSlowDriver);
  const FineSampler fast(cfg.fast_spec(), grid, c.m, kStreamFastDriver);
  return sample_mixed(slow, fast, sample).xi;
}

AveragedDriftEstimate drift_from_config(const ExperimentConfig& cfg, const Vec& x) {
  cfg.validate();
  const WorkerScope workers(cfg.workers);
  const Generator gen = cfg.generator();
  const CoefficientSet c = cfg.coefficient_set();
  const auto n = static_cast<Eigen::Index>(c.modes);
  require(x.size() == n, ErrorKind::invalid_input, "drift point has the wrong number of modes");
  const Vec zero = Vec::Zero(n);
  const double slope =
      ergodicity_decay(x, zero, Vec::Ones(n), c, gen, 10.0, cfg.frozen_step, 64, mix_seed(cfg.seed, "ergodicity"))
          .slope;
  return averaged_drift(x, c, gen, cfg.t_star, cfg.frozen_samples, cfg.frozen_step, mix_seed(cfg.seed, "frozen"),
                        slope);
}

void write_table(const std::filesystem::path& dir, const std::string& name, const CsvTable& table) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / (name + ".csv"), std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::configuration, "cannot write " + (dir / (name + ".csv")).string());
  table.write(out);
}

}  // namespace roughavg
