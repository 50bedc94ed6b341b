#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "roughavg/averaging.hpp"
#include "roughavg/drift_table.hpp"
#include "roughavg/error.hpp"
#include "roughavg/lift.hpp"
#include "roughavg/rpde_solver.hpp"

using namespace roughavg;

namespace {

bool throws_kind(ErrorKind kind, const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

Vec start(std::size_t modes, double a, double b) {
  Vec v = Vec::Zero(static_cast<Eigen::Index>(modes));
  v[0] = a;
  v[1] = b;
  return v;
}

MixedSample mixed(std::size_t steps, std::size_t fine, std::size_t d, std::size_t m, std::uint32_t sample) {
  LiftSpec slow;
  slow.kind = LiftKind::fbm;
  slow.hurst = 0.45;
  slow.fine_factor = fine;
  slow.seed = 12;
  LiftSpec fast;
  fast.fine_factor = fine;
  fast.seed = 12;
  const TimeGrid grid = TimeGrid::uniform(1.0, steps);
  return sample_mixed(FineSampler(slow, grid, d, kStreamSlowDriver), FineSampler(fast, grid, m, kStreamFastDriver), sample);
}

CoefficientSet linear_frozen(double kappa) {
  CoefficientSet c = oracle::zero_set(3, 1, 1);
  c.f2 = [kappa](const Vec&, const Vec& y) { return Vec(-kappa * y); };
  c.lip_f2 = kappa;
  return c;
}

}  // namespace

TEST_CASE("frozen_solve of a noiseless linear equation") {
  const Generator gen = Generator::dirichlet_laplacian(3);
  const double kappa = 0.5;
  const CoefficientSet c = linear_frozen(kappa);
  std::vector<double> err;
  for (double h : {0.01, 0.005, 0.0025}) {
    const std::vector<Vec> y = frozen_solve(Vec::Zero(3), Vec::Unit(3, 0), c, gen, 1.0, h, 1);
    CHECK(y.size() == static_cast<std::size_t>(std::lround(1.0 / h)) + 1);
    err.push_back(std::abs(y.back()[0] - std::exp(-(1.0 + kappa))));
    CHECK(y.back()[1] == 0.0);
  }
  CHECK(err[0] <= 0.01);
  CHECK(err[0] / err[1] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(err[1] / err[2] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("frozen solves are deterministic and have bounded second moments") {
  const Generator gen = Generator::dirichlet_laplacian(8);
  const CoefficientSet c = bounded_nemytskii(8);
  const Vec x = start(8, 0.3, -0.4);
  const std::vector<Vec> a = frozen_solve(x, Vec::Ones(8), c, gen, 2.0, 0.01, 77, 3);
  const std::vector<Vec> b = frozen_solve(x, Vec::Ones(8), c, gen, 2.0, 0.01, 77, 3);
  CHECK(a == b);
  CHECK(frozen_endpoint(x, Vec::Ones(8), c, gen, 2.0, 0.01, 77, 3) == a.back());

  // sup_t E||Y_t||^2 / (1 + ||x||^2 + ||y||^2) stays of the same size as the start grows.
  std::vector<double> ratio;
  for (double scale : {0.0, 1.0, 3.0}) {
    const Vec y0 = Vec::Constant(8, scale);
    std::vector<double> second(401, 0.0);
    for (std::uint32_t s = 0; s < 64; ++s) {
      const std::vector<Vec> y = frozen_solve(x, y0, c, gen, 4.0, 0.01, 5, s);
      for (std::size_t k = 0; k < y.size(); ++k) second[k] += y[k].squaredNorm() / 64.0;
    }
    double sup = 0.0;
    for (double v : second) sup = std::max(sup, v);
    ratio.push_back(sup / (1.0 + x.squaredNorm() + y0.squaredNorm()));
  }
  MESSAGE("moment ratios " << ratio[0] << " " << ratio[1] << " " << ratio[2]);
  for (double r : ratio) CHECK(r <= 2.0 * ratio[0] + 1.0);
}

TEST_CASE("ergodicity_decay") {
  const Generator gen = Generator::dirichlet_laplacian(16);
  const CoefficientSet ou = dissipative_ou(16);
  const Vec x = Vec::Zero(16);
  const ErgodicityFit same = ergodicity_decay(x, Vec::Ones(16), Vec::Ones(16), ou, gen, 5.0, 0.01, 8, 1);
  CHECK(std::isinf(same.slope));
  CHECK(same.slope < 0.0);
  for (double v : same.mean_sq) CHECK(v == 0.0);

  const ErgodicityFit fit = ergodicity_decay(x, Vec::Zero(16), Vec::Ones(16), ou, gen, 10.0, 0.01, 64, 1);
  CHECK(fit.slope == doctest::Approx(-2.0 * (1.0 + 0.5)).epsilon(0.2));
  CHECK(fit.fit_start == doctest::Approx(1.0));
  for (const char* name : {"dissipative-ou", "bounded-nemytskii"}) {
    const CoefficientSet c = make_coefficients(name, 16);
    const ErgodicityFit a = ergodicity_decay(x, Vec::Zero(16), Vec::Ones(16), c, gen, 10.0, 0.01, 64, 2);
    const ErgodicityFit b = ergodicity_decay(x, Vec::Zero(16), Vec::Ones(16), c, gen, 10.0, 0.01, 128, 2);
    CHECK(a.slope < 0.0);
    CHECK(a.slope <= ergodicity_rate_bound(c, gen));
    CHECK(b.slope == doctest::Approx(a.slope).epsilon(0.1));
  }
}

TEST_CASE("averaged_drift examples") {
  const Generator gen = Generator::dirichlet_laplacian(8);
  const Vec x = start(8, 0.7, -0.2);

  const CoefficientSet plain = dissipative_ou(8, {{"p", 0.0}});
  const AveragedDriftEstimate exact = averaged_drift(x, plain, gen, 5.0, 32, 0.01, 3, -3.0);
  CHECK((exact.value.coeffs() - plain.f1(x, Vec::Zero(8))).norm() <= 1e-15);
  CHECK(exact.stderr <= 1e-15);
  CHECK(exact.samples == 32);
  CHECK(exact.burn_in == 5.0);

  const CoefficientSet ou = dissipative_ou(8);
  const AveragedDriftEstimate est = averaged_drift(x, ou, gen, 8.0, 1024, 0.005, 4, -3.0);
  const Vec closed = ou.averaged_drift(x, gen);
  for (Eigen::Index k = 0; k < 8; ++k) CHECK(std::abs(est.value.coeffs()[k] - closed[k]) <= 3.0 * est.stderr);
  CHECK(est.stderr <= 1e-2);

  const CoefficientSet odd = oracle::odd_ou_set(8, 0.5, 0.7, 1);
  const AveragedDriftEstimate sym = averaged_drift(x, odd, gen, 6.0, 2048, 0.01, 5, -3.0);
  CHECK(std::abs(sym.value[0]) <= 3.0 * sym.stderr);

  CHECK(throws_kind(ErrorKind::configuration, [&] { (void)averaged_drift(x, ou, gen, 1.0, 16, 0.01, 1, -3.0); }));
  CHECK(min_t_star(-3.0) == doctest::Approx(std::log(1e3) / 3.0));
  CHECK(std::isinf(averaged_drift(x, ou, gen, 3.0, 1, 0.01, 1, -3.0).stderr));
}

TEST_CASE("averaged_drift forgets the initial fast state") {
  const Generator gen = Generator::dirichlet_laplacian(8);
  const CoefficientSet c = bounded_nemytskii(8);
  const Vec x = start(8, 0.4, 0.1);
  const ErgodicityFit fit = ergodicity_decay(x, Vec::Zero(8), Vec::Ones(8), c, gen, 10.0, 0.01, 64, 9);
  // The precondition only bounds the squared coupled distance by 1e-3 relative
  // to the start, so the invariance is checked at the default burn-in.
  const double t_star = 8.0;
  CHECK(t_star >= min_t_star(fit.slope));
  const AveragedDriftEstimate a = averaged_drift(x, c, gen, t_star, 512, 0.01, 6, fit.slope);
  const AveragedDriftEstimate b = averaged_drift(x, c, gen, t_star, 512, 0.01, 6, fit.slope, Vec::Constant(8, 2.0));
  CHECK(norm_alpha(a.value - b.value, gen, 0.0) <= 3.0 * std::max(a.stderr, b.stderr));
}

TEST_CASE("solve_averaged") {
  const Generator gen = Generator::dirichlet_laplacian(8);
  const MixedSample m = mixed(256, 4, 2, 2, 0);
  const CoefficientSet zero = oracle::zero_set(8, 2, 2);
  const Vec x0 = start(8, 1.0, -1.0);
  const std::vector<Vec> free_flow = solve_averaged(x0, zero, gen, m.slow, [](const Vec&) { return Vec(Vec::Zero(8)); });
  for (std::size_t i = 0; i <= 256; ++i)
    CHECK((free_flow[i] - (gen.decay(m.slow.grid()[i]) * x0.array()).matrix()).norm() <= 1e-14);

  // Closed form and ensemble table agree within the propagated table error.
  const CoefficientSet ou = dissipative_ou(8);
  DriftTableOptions opts;
  opts.samples = 1024;
  opts.seed = 31;
  const DriftTable table(ou, gen, opts);
  const std::vector<Vec> xa = solve_averaged(x0, ou, gen, m.slow, [&](const Vec& x) { return ou.averaged_drift(x, gen); });
  const std::vector<Vec> xb = solve_averaged(x0, ou, gen, m.slow, [&](const Vec& x) { return table(x); });
  double sup = 0.0;
  for (std::size_t i = 0; i <= 256; ++i) sup = std::max(sup, (xa[i] - xb[i]).norm());
  const double propagated = m.slow.grid().horizon() * (table.max_stderr() + table.quantization_error());
  MESSAGE("sup gap " << sup << ", propagated table error " << propagated);
  CHECK(sup <= 3.0 * propagated);

  // ||Xbar||_{eta,0} / (1 + ||x||) stays bounded as the start grows.
  const std::vector<Vec> zeros(257, Vec::Zero(8));
  std::vector<double> ratio;
  for (double size : {0.1, 1.0, 10.0}) {
    const Vec xs = start(8, size / std::sqrt(2.0), size / std::sqrt(2.0));
    const std::vector<Vec> path = solve_averaged(xs, ou, gen, m.slow, [&](const Vec& x) { return ou.averaged_drift(x, gen); });
    ratio.push_back(reduced_holder_error(path, zeros, m.slow.grid(), gen, 0.3) / (1.0 + size));
  }
  MESSAGE("bound ratios " << ratio[0] << " " << ratio[1] << " " << ratio[2]);
  CHECK(ratio[1] <= 2.0 * ratio[0]);
  CHECK(ratio[2] <= 2.0 * ratio[0]);
}

TEST_CASE("auxiliary_solve") {
  const Generator gen = Generator::dirichlet_laplacian(8);
  const CoefficientSet c = bounded_nemytskii(8);
  const MixedSample m = mixed(128, 4, 2, 2, 2);
  const double eps = 0.01;
  const SlowFastPath p = solve_slow_fast(start(8, 0.5, -0.5), Vec::Zero(8), c, gen, m.xi, eps);
  const double h = m.xi.grid().step();

  const std::vector<Vec> frozen = solve_fast_ito({p.x.front()}, Vec::Zero(8), c, gen, m.xi, 2, eps);
  for (double delta : {1.0, 2.0}) {
    const std::vector<Vec> aux = auxiliary_solve(p.x, Vec::Zero(8), c, gen, m.xi, 2, eps, delta);
    for (std::size_t i = 0; i <= 128; ++i) CHECK(aux[i] == frozen[i]);
  }
  const std::vector<Vec> lagged = auxiliary_solve(p.x, Vec::Zero(8), c, gen, m.xi, 2, eps, h);
  const std::vector<Vec> ito = solve_fast_ito(p.x, Vec::Zero(8), c, gen, m.xi, 2, eps);
  double gap_small = 0.0, gap_large = 0.0;
  for (std::size_t i = 0; i <= 128; ++i) {
    CHECK((lagged[i] - ito[i]).norm() <= 1e-15);
    gap_small = std::max(gap_small, (lagged[i] - p.y[i]).norm());
    gap_large = std::max(gap_large, (frozen[i] - p.y[i]).norm());
  }
  CHECK(gap_small < gap_large);
  CHECK(throws_kind(ErrorKind::configuration, [&] { (void)auxiliary_solve(p.x, Vec::Zero(8), c, gen, m.xi, 2, eps, 1.5 * h); }));
}

TEST_CASE("reduced_holder_error") {
  const Generator gen = Generator::dirichlet_laplacian(4);
  const TimeGrid grid = TimeGrid::uniform(1.0, 200);
  const SemigroupTable table(gen, grid);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  auto random_path = [&] {
    std::vector<Vec> p(201, Vec::Zero(4));
    for (auto& v : p)
      for (auto& c : v) c = z(rng);
    return p;
  };
  const std::vector<Vec> a = random_path();
  CHECK(reduced_holder_error(a, a, table, 0.3) == 0.0);

  std::vector<Vec> orbit, flat, zeros(201, Vec::Zero(4));
  for (double t : grid.times()) {
    orbit.push_back((gen.decay(t) * start(4, 2.0, -1.0).array()).matrix());
    flat.push_back(Vec::Unit(4, 0));
  }
  CHECK(reduced_holder_error(orbit, zeros, table, 0.3) <= 1e-14);
  CHECK(reduced_holder_error(flat, zeros, table, 0.4) ==
        doctest::Approx(oracle::constant_orbit_gap_sup(1.0, 0.4, grid.step(), 200)).epsilon(1e-12));
  CHECK(reduced_holder_error(flat, zeros, grid, gen, 0.4) == reduced_holder_error(flat, zeros, table, 0.4));

  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<Vec> p = random_path(), q = random_path(), r = random_path();
    const double pq = reduced_holder_error(p, q, table, 0.3);
    CHECK(pq == doctest::Approx(reduced_holder_error(q, p, table, 0.3)).epsilon(1e-14));
    CHECK(pq <= (reduced_holder_error(p, r, table, 0.3) + reduced_holder_error(r, q, table, 0.3)) * (1 + 1e-14));
  }
}

TEST_CASE("delta_schedule") {
  CHECK(delta_schedule(1.0, 0.4) == 1.0);
  CHECK(delta_schedule(1e-4, 0.5) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(delta_schedule(1e-3, 0.4) == doctest::Approx(std::pow(1e-3, 1.0 / 3.6)).epsilon(1e-14));
  CHECK(delta_schedule(1e-3, 0.4) == doctest::Approx(0.1468).epsilon(1e-3));
  CHECK(throws_kind(ErrorKind::invalid_input, [] { (void)delta_schedule(0.0, 0.4); }));
  CHECK(throws_kind(ErrorKind::invalid_input, [] { (void)delta_schedule(-1.0, 0.4); }));
  CHECK(round_up_to_step(0.1468, 1.0 / 4096) == doctest::Approx(602.0 / 4096));
  CHECK(round_up_to_step(0.25, 0.125) == 0.25);
}
