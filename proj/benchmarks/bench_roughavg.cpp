#include <benchmark/benchmark.h>

#include "roughavg/config.hpp"
#include "roughavg/controlled.hpp"
#include "roughavg/lift.hpp"
#include "roughavg/rpde_solver.hpp"

using namespace roughavg;

namespace {

ExperimentConfig bench_config() {
  ExperimentConfig cfg;
  cfg.modes = 32;
  cfg.steps = 1024;
  cfg.fine_factor = 64;
  cfg.validate();
  return cfg;
}

void lift_brownian_path(benchmark::State& state) {
  LiftSpec spec;
  spec.fine_factor = static_cast<std::size_t>(state.range(0));
  const TimeGrid grid = TimeGrid::uniform(1.0, 1024);
  std::uint32_t sample = 0;
  for (auto _ : state) benchmark::DoNotOptimize(lift_brownian(spec, grid, 2, sample++));
}
BENCHMARK(lift_brownian_path)->Arg(16)->Arg(64);

void lift_fbm_path(benchmark::State& state) {
  LiftSpec spec;
  spec.kind = LiftKind::fbm;
  spec.hurst = 0.45;
  spec.fine_factor = 64;
  const TimeGrid grid = TimeGrid::uniform(1.0, static_cast<std::size_t>(state.range(0)));
  std::uint32_t sample = 0;
  for (auto _ : state) benchmark::DoNotOptimize(lift_fbm(spec, grid, 1, sample++));
}
BENCHMARK(lift_fbm_path)->Arg(1024)->Arg(4096);

void slow_fast_step(benchmark::State& state) {
  const ExperimentConfig cfg = bench_config();
  const CoefficientSet c = cfg.coefficient_set();
  const Generator gen = cfg.generator();
  const double h = 1.0 / 1024;
  StepNoise noise{Vec::Constant(1, 0.01),      Vec::Constant(1, 0.02),      Mat::Constant(1, 1, 1e-4),
                  Mat::Constant(1, 1, 1e-4), Mat::Constant(1, 1, 1e-4)};
  SlowFastState s{SpectralVector(cfg.initial_x()), SpectralVector(cfg.initial_y()), 0.0};
  for (auto _ : state) {
    s = step_slow_fast(s, c, gen, noise, 1e-2, h);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(slow_fast_step);

void convolution_sum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Generator gen = Generator::dirichlet_laplacian(32);
  const TimeGrid grid = TimeGrid::uniform(1.0, n);
  LiftSpec spec;
  const RoughPath x = lift_brownian(spec, grid, 1);
  std::vector<Eigen::VectorXd> y(grid.points(), Eigen::VectorXd::Ones(32));
  const ControlledPath cp = ControlledPath::from_vectors(grid, 1, 0.0, y,
                                                         std::vector<Eigen::MatrixXd>(grid.points(), Eigen::MatrixXd::Zero(32, 1)));
  for (auto _ : state) benchmark::DoNotOptimize(rough_convolution(x, cp, 0, n, gen));
}
BENCHMARK(convolution_sum)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
