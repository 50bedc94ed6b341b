#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "roughavg/controlled.hpp"
#include "roughavg/error.hpp"
#include "roughavg/lift.hpp"
#include "roughavg/rough_path.hpp"

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

RoughPath linear_driver(const TimeGrid& grid) {
  return lift_smooth(
      grid, 1, 0.5, [](double t) { return Eigen::VectorXd(Eigen::VectorXd::Constant(1, t)); },
      [](double s, double t) { return Eigen::MatrixXd(Eigen::MatrixXd::Constant(1, 1, 0.5 * (t - s) * (t - s))); });
}

// Y = c e_mode, Y' = 0, one driver component.
ControlledPath constant_integrand(const TimeGrid& grid, std::size_t modes, std::size_t mode, double c) {
  std::vector<Eigen::VectorXd> y(grid.points(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(modes)));
  for (auto& v : y) v[static_cast<Eigen::Index>(mode)] = c;
  return ControlledPath::from_vectors(grid, 1, 0.0, y,
                                      std::vector<Eigen::MatrixXd>(grid.points(), Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(modes), 1)));
}

// Y^k = sin(1 + X^k) e_k with Y'^{(k,j)} = delta_kj cos(1 + X^k) e_k.
ControlledPath sine_integrand(const RoughPath& x, std::size_t modes) {
  const std::size_t d = x.dim();
  const auto n = static_cast<Eigen::Index>(modes);
  std::vector<Eigen::MatrixXd> y, yp;
  for (std::size_t i = 0; i < x.grid().points(); ++i) {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(d));
    Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(d * d));
    for (std::size_t k = 0; k < d; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      v(kk, kk) = std::sin(1.0 + x.value(i)[kk]);
      dv(kk, static_cast<Eigen::Index>(k * d + k)) = std::cos(1.0 + x.value(i)[kk]);
    }
    y.push_back(v);
    yp.push_back(dv);
  }
  return ControlledPath(x.grid(), d, 0.0, y, yp);
}

RoughPath brownian(std::size_t steps, std::size_t dim, std::uint64_t seed) {
  LiftSpec s;
  s.seed = seed;
  s.fine_factor = 8;
  return lift_brownian(s, TimeGrid::uniform(1.0, steps), dim);
}

}  // namespace

TEST_CASE("reduced_increment examples") {
  const Generator gen = Generator::dirichlet_laplacian(4);
  const TimeGrid grid({0.0, 0.2, std::log(2.0) + 0.2, 1.5});
  SpectralVector x(4);
  x[0] = 1.0;
  x[2] = -2.0;
  std::vector<SpectralVector> orbit, flat;
  for (double t : grid.times()) {
    orbit.push_back(apply_semigroup(t, x, gen));
    flat.push_back(SpectralVector::unit(4, 0));
  }
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t t = s; t < 4; ++t) CHECK(norm_alpha(reduced_increment(orbit, grid, s, t, gen), gen, 0.0) <= 1e-15);
  CHECK(norm_alpha(reduced_increment(flat, grid, 2, 2, gen), gen, 0.0) == 0.0);
  const SpectralVector half = reduced_increment(flat, grid, 1, 2, gen);
  CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(half[1] == 0.0);
  CHECK(throws_kind(ErrorKind::invalid_input, [&] { (void)reduced_increment(flat, grid, 2, 1, gen); }));
}

TEST_CASE("controlled_seminorm vanishes on zero and orbit paths") {
  const Generator gen = Generator::dirichlet_laplacian(6);
  const RoughPath x = brownian(64, 2, 3);
  const auto n = Eigen::Index{6};
  std::vector<Eigen::VectorXd> zero(65, Eigen::VectorXd::Zero(n)), orbit;
  Eigen::VectorXd x0 = Eigen::VectorXd::LinSpaced(n, 1.0, -1.0);
  for (double t : x.grid().times()) orbit.push_back((gen.decay(t) * x0.array()).matrix());
  const std::vector<Eigen::MatrixXd> dzero(65, Eigen::MatrixXd::Zero(n, 2));
  for (const auto* path : {&zero, &orbit}) {
    const ControlledNorms c = controlled_seminorm(ControlledPath::from_vectors(x.grid(), 2, 0.0, *path, dzero), x, 0.4, 0.0, gen);
    CHECK(c.derivative_holder == 0.0);
    CHECK(c.remainder_holder <= 1e-14);
    CHECK(c.combined == doctest::Approx(c.derivative_holder + c.remainder_holder));
  }
}

TEST_CASE("controlled path bounds its own Hoelder norm") {
  const Generator gen = Generator::dirichlet_laplacian(4);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RoughPath x = brownian(128, 2, seed);
    const ControlledNorms c = controlled_seminorm(sine_integrand(x, 4), x, 0.4, 0.0, gen);
    CHECK(c.path_holder <= c.path_bound * (1 + 1e-12));
  }
}

TEST_CASE("rough_convolution of a constant against a linear driver") {
  const Generator flat({0.0}, true);
  const TimeGrid grid = TimeGrid::uniform(2.0, 50);
  const RoughPath x = linear_driver(grid);
  CHECK(rough_convolution(x, constant_integrand(grid, 1, 0, 1.7), 10, 35, flat)[0] ==
        doctest::Approx(1.7 * (grid[35] - grid[10])).epsilon(1e-13));

  // First order in mesh towards c (1 - e^{-lambda span}) / lambda, per mode.
  const Generator gen = Generator::dirichlet_laplacian(3);
  std::vector<double> err;
  for (std::size_t n : {256, 512, 1024, 2048, 4096}) {
    const TimeGrid g = TimeGrid::uniform(1.0, n);
    const RoughPath lx = linear_driver(g);
    Eigen::VectorXd total = Eigen::VectorXd::Zero(3);
    for (std::size_t mode = 0; mode < 3; ++mode) total += rough_convolution(lx, constant_integrand(g, 3, mode, 1.0), 0, n, gen);
    double e = 0.0;
    for (std::size_t mode = 0; mode < 3; ++mode)
      e = std::max(e, std::abs(total[static_cast<Eigen::Index>(mode)] - oracle::scalar_convolution(1.0, gen.eigenvalue(mode), 1.0)));
    err.push_back(e);
  }
  for (std::size_t k = 1; k < err.size(); ++k) CHECK(err[k - 1] / err[k] == doctest::Approx(2.0).epsilon(0.05));

  CHECK(throws_kind(ErrorKind::invalid_input, [&] { (void)rough_convolution(x, constant_integrand(grid, 1, 0, 1.0), 5, 5, flat); }));
  const TimeGrid other = TimeGrid::uniform(2.0, 40);
  CHECK(throws_kind(ErrorKind::invalid_input, [&] { (void)rough_convolution(x, constant_integrand(other, 1, 0, 1.0), 0, 5, flat); }));
}

TEST_CASE("rough_convolution is additive over adjacent intervals") {
  const Generator gen = Generator::dirichlet_laplacian(4);
  const RoughPath x = brownian(96, 2, 8);
  const ControlledPath y = sine_integrand(x, 4);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<std::size_t> idx(0, 96);
    std::size_t a = idx(rng), b = idx(rng), c = idx(rng);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    if (a == b || b == c) continue;
    const Eigen::VectorXd whole = rough_convolution(x, y, a, c, gen);
    Eigen::VectorXd split = rough_convolution(x, y, a, b, gen);
    split = (gen.decay(x.grid()[c] - x.grid()[b]) * split.array()).matrix() + rough_convolution(x, y, b, c, gen);
    CHECK((whole - split).norm() <= 1e-12);
  }
  const std::vector<Eigen::VectorXd> path = rough_convolution_path(x, y, gen);
  CHECK(path[0].norm() == 0.0);
  CHECK((path[96] - rough_convolution(x, y, 0, 96, gen)).norm() <= 1e-12);
}

TEST_CASE("sewing defect obeys the local bound") {
  const Generator gen = Generator::dirichlet_laplacian(4);
  const double gamma = 0.4;
  std::mt19937_64 rng(17);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const RoughPath x = brownian(128, 2, seed);
    const ControlledPath y = sine_integrand(x, 4);
    const double k = sewing_constant(controlled_seminorm(y, x, gamma, 0.0, gen));
    CHECK(k > 0.0);
    for (int trial = 0; trial < 25; ++trial) {
      std::uniform_int_distribution<std::size_t> idx(0, 128);
      std::size_t u = idx(rng), v = idx(rng);
      if (u > v) std::swap(u, v);
      if (v - u < 2) continue;
      const std::size_t w = (u + v) / 2;
      const double span = x.grid()[v] - x.grid()[u];
      CHECK(sewing_defect(x, y, u, w, v, 0.0, gen) <= k * std::pow(span, 3.0 * gamma) * (1 + 1e-9));
    }
    // The sewing lemma constant for a 3 gamma > 1 germ.
    CHECK(measured_intbound_constant(x, y, gamma, 0.0, gen) <= 1.0 / (1.0 - std::pow(2.0, 1.0 - 3.0 * gamma)));
  }
}

TEST_CASE("convolution of a smooth driver is controlled with a bounded remainder") {
  const Generator gen({1.0});
  const TimeGrid grid = TimeGrid::uniform(1.0, 256);
  const RoughPath x = linear_driver(grid);
  const ControlledPath integrand = constant_integrand(grid, 1, 0, 2.0);
  const std::vector<Eigen::VectorXd> z = rough_convolution_path(x, integrand, gen);
  const ControlledPath zc =
      ControlledPath::from_vectors(grid, 1, 0.0, z, std::vector<Eigen::MatrixXd>(grid.points(), Eigen::MatrixXd::Constant(1, 1, 2.0)));
  const ControlledNorms zn = controlled_seminorm(zc, x, 0.4, 0.0, gen);
  const ControlledNorms in = controlled_seminorm(integrand, x, 0.4, 0.0, gen);
  const double bound = measured_intbound_constant(x, integrand, 0.4, 0.0, gen) * sewing_constant(in) + in.path_holder * in.driver_holder;
  CHECK(zn.remainder_holder <= bound * (1 + 1e-9));
}

TEST_CASE("compose_function") {
  const Generator gen({1.0, 4.0});
  const RoughPath x = brownian(128, 1, 21);
  std::vector<Eigen::VectorXd> y;
  std::vector<Eigen::MatrixXd> yp;
  for (std::size_t i = 0; i <= 128; ++i) {
    Eigen::VectorXd v(2);
    v << std::sin(x.value(i)[0]), 0.3;
    Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(2, 1);
    dv(0, 0) = std::cos(x.value(i)[0]);
    y.push_back(v);
    yp.push_back(dv);
  }
  const ControlledPath cp = ControlledPath::from_vectors(x.grid(), 1, 0.0, y, yp);

  SpectralMap identity{[](const Eigen::VectorXd& v) { return Eigen::MatrixXd(v); },
                       [](const Eigen::VectorXd&, const Eigen::VectorXd& v) { return Eigen::MatrixXd(v); }};
  const ControlledPath same = compose_function(identity, cp);
  for (std::size_t i = 0; i <= 128; ++i) {
    CHECK(same.value(i) == cp.value(i));
    CHECK(same.derivative(i) == cp.derivative(i));
  }

  SpectralMap constant{[](const Eigen::VectorXd&) { return Eigen::MatrixXd(Eigen::MatrixXd::Constant(2, 1, 0.7)); },
                       [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return Eigen::MatrixXd(Eigen::MatrixXd::Zero(2, 1)); }};
  const ControlledPath flat = compose_function(constant, cp);
  for (std::size_t i = 0; i <= 128; ++i) CHECK(flat.derivative(i).norm() == 0.0);
  // Remainder of a constant is its reduced increment: (1 - e^{-lambda (t-s)}) 0.7.
  const Eigen::MatrixXd r = controlled_remainder(flat, x, 3, 40, gen);
  const double dt = x.grid()[40] - x.grid()[3];
  CHECK(r(0, 0) == doctest::Approx((1 - std::exp(-dt)) * 0.7));
  CHECK(r(1, 0) == doctest::Approx((1 - std::exp(-4 * dt)) * 0.7));

  Eigen::VectorXd u0(2);
  u0 << 1.0, -0.5;
  SpectralMap squash{[u0](const Eigen::VectorXd& v) { return Eigen::MatrixXd(std::tanh(v[0]) * u0); },
                     [u0](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
                       const double c = std::cosh(v[0]);
                       return Eigen::MatrixXd(dv[0] / (c * c) * u0);
                     }};
  const ControlledPath z = compose_function(squash, cp);
  // Finite-difference Gubinelli check: the one-step remainder is O(h^{2 gamma}).
  const ControlledNorms zn = controlled_seminorm(z, x, 0.4, 0.0, gen);
  const ControlledNorms yn = controlled_seminorm(cp, x, 0.4, 0.0, gen);
  CHECK(zn.remainder_holder <= 4.0 * (yn.remainder_holder + yn.derivative_sup * yn.derivative_sup * yn.driver_holder * yn.driver_holder) + 4.0 * u0.norm());
  for (std::size_t i = 0; i < 128; ++i) {
    const Eigen::MatrixXd rem = controlled_remainder(z, x, i, i + 1, gen);
    const double h = x.grid().dt(i);
    CHECK(rem.norm() <= zn.remainder_holder * std::pow(h, 0.8) * (1 + 1e-12));
  }

  SpectralMap no_derivative{identity.value, nullptr};
  CHECK(throws_kind(ErrorKind::unsupported_coefficient, [&] { (void)compose_function(no_derivative, cp); }));
}
