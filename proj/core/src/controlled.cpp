#include "roughavg/controlled.hpp"

#include <algorithm>
#include <cmath>

#include "roughavg/error.hpp"
#include "roughavg/pairs.hpp"

namespace roughavg {

namespace {

Eigen::MatrixXd semigroup(double t, Eigen::MatrixXd m, const Generator& gen) {
  m.array().colwise() *= gen.decay(t);
  return m;
}

// Column k of the result: sum_{j} Y'^{(k,j)} applied against row j of the
// second level, i.e. sum_j Y'^{(k,j)} X^2(j, k).
Eigen::VectorXd second_order_term(const Eigen::MatrixXd& yp, std::size_t dim, const Eigen::Ref<const RowMatrix>& area) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(yp.rows());
  const auto d = static_cast<Eigen::Index>(dim);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index j = 0; j < d; ++j) out += area(j, k) * yp.col(k * d + j);
  return out;
}

void check_shared(const RoughPath& x, const ControlledPath& cp) {
  require(x.grid() == cp.grid(), ErrorKind::invalid_input, "controlled path and driver use different grids");
  require(x.dim() == cp.driver_dim(), ErrorKind::invalid_input, "controlled path and driver dimensions differ");
}

}  // namespace

ControlledPath::ControlledPath(TimeGrid grid, std::size_t driver_dim, double alpha, std::vector<Eigen::MatrixXd> y,
                               std::vector<Eigen::MatrixXd> yp)
    : grid_(std::move(grid)), driver_dim_(driver_dim), alpha_(alpha), y_(std::move(y)), yp_(std::move(yp)) {
  require(driver_dim_ >= 1, ErrorKind::invalid_input, "controlled path needs a driver dimension");
  require(y_.size() == grid_.points() && yp_.size() == grid_.points(), ErrorKind::invalid_input,
          "controlled path needs one value and derivative per grid point");
  modes_ = static_cast<std::size_t>(y_.front().rows());
  columns_ = static_cast<std::size_t>(y_.front().cols());
  require(modes_ >= 1 && columns_ >= 1, ErrorKind::invalid_input, "controlled path values are empty");
  for (std::size_t i = 0; i < y_.size(); ++i) {
    require(static_cast<std::size_t>(y_[i].rows()) == modes_ && static_cast<std::size_t>(y_[i].cols()) == columns_,
            ErrorKind::invalid_input, "controlled path values change shape");
    require(static_cast<std::size_t>(yp_[i].rows()) == modes_ &&
                static_cast<std::size_t>(yp_[i].cols()) == columns_ * driver_dim_,
            ErrorKind::invalid_input, "Gubinelli derivative has the wrong shape");
    require(y_[i].allFinite() && yp_[i].allFinite(), ErrorKind::invalid_input, "controlled path is not finite");
  }
}

ControlledPath ControlledPath::from_vectors(TimeGrid grid, std::size_t driver_dim, double alpha,
                                            const std::vector<Eigen::VectorXd>& y, std::vector<Eigen::MatrixXd> yp) {
  std::vector<Eigen::MatrixXd> values(y.begin(), y.end());
  return ControlledPath(std::move(grid), driver_dim, alpha, std::move(values), std::move(yp));
}

SpectralVector reduced_increment(const std::vector<SpectralVector>& f, const TimeGrid& grid, std::size_t s,
                                 std::size_t t, const Generator& gen) {
  require(s <= t, ErrorKind::invalid_input, "reduced increment needs s <= t");
  require(t < grid.points() && f.size() == grid.points(), ErrorKind::invalid_index, "reduced increment index out of range");
  return f[t] - apply_semigroup(grid[t] - grid[s], f[s], gen);
}

Eigen::MatrixXd reduced_increment(const std::vector<Eigen::MatrixXd>& f, const TimeGrid& grid, std::size_t s,
                                  std::size_t t, const Generator& gen) {
  require(s <= t, ErrorKind::invalid_input, "reduced increment needs s <= t");
  require(t < grid.points() && f.size() == grid.points(), ErrorKind::invalid_index, "reduced increment index out of range");
  return f[t] - semigroup(grid[t] - grid[s], f[s], gen);
}

Eigen::MatrixXd apply_derivative(const Eigen::MatrixXd& yp, std::size_t columns,
                                 const Eigen::Ref<const Eigen::VectorXd>& v) {
  const auto d = v.size();
  Eigen::MatrixXd out(yp.rows(), static_cast<Eigen::Index>(columns));
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(columns); ++k)
    out.col(k) = yp.middleCols(k * d, d) * v;
  return out;
}

Eigen::MatrixXd controlled_remainder(const ControlledPath& cp, const RoughPath& x, std::size_t s, std::size_t t,
                                     const Generator& gen) {
  check_shared(x, cp);
  require(s <= t, ErrorKind::invalid_input, "remainder needs s <= t");
  const double gap = cp.grid()[t] - cp.grid()[s];
  Eigen::MatrixXd lead = cp.value(s) + apply_derivative(cp.derivative(s), cp.columns(), x.increment(s, t));
  return cp.value(t) - semigroup(gap, std::move(lead), gen);
}

ControlledNorms controlled_seminorm(const ControlledPath& cp, const RoughPath& x, double gamma, double alpha,
                                    const Generator& gen) {
  check_shared(x, cp);
  const auto& grid = cp.grid();
  const auto prefix = prefix_second_level(x);
  const PairSet& set = holder_pairs(grid.steps());
  const double min_gap = grid.step() * (1.0 - 1e-12);

  ControlledNorms out;
  out.exhaustive = set.exhaustive;
  for (std::size_t i = 0; i < grid.points(); ++i)
    out.derivative_sup = std::max(out.derivative_sup, norm_alpha_columns(cp.derivative(i), gen, alpha));

  for (const auto [i, j] : set.pairs) {
    const double gap = grid[j] - grid[i];
    if (gap < min_gap) continue;
    const Eigen::ArrayXd decay = gen.decay(gap);
    const Eigen::VectorXd dx = x.increment(i, j);

    Eigen::MatrixXd dyp = cp.derivative(j);
    dyp -= (cp.derivative(i).array().colwise() * decay).matrix();
    Eigen::MatrixXd dy = cp.value(j);
    dy -= (cp.value(i).array().colwise() * decay).matrix();
    Eigen::MatrixXd rem = dy;
    rem -= (apply_derivative(cp.derivative(i), cp.columns(), dx).array().colwise() * decay).matrix();

    RowMatrix area = prefix[j] - prefix[i];
    area.noalias() -= x.increment(0, i) * dx.transpose();

    const double pg = std::pow(gap, gamma);
    out.derivative_holder = std::max(out.derivative_holder, norm_alpha_columns(dyp, gen, alpha) / pg);
    out.remainder_holder = std::max(out.remainder_holder, norm_alpha_columns(rem, gen, alpha) / (pg * pg));
    out.path_holder = std::max(out.path_holder, norm_alpha_columns(dy, gen, alpha) / pg);
    out.driver_holder = std::max(out.driver_holder, dx.norm() / pg);
    out.area_holder = std::max(out.area_holder, area.norm() / (pg * pg));
  }
  out.combined = out.derivative_holder + out.remainder_holder;
  out.path_bound = out.remainder_holder * std::pow(grid.horizon(), gamma) + out.derivative_sup * out.driver_holder;
  return out;
}

Eigen::VectorXd convolution_germ(const RoughPath& x, const ControlledPath& cp, std::size_t s, std::size_t t,
                                 const Generator& gen) {
  check_shared(x, cp);
  require(s < t && t <= x.steps(), ErrorKind::invalid_input, "convolution germ needs s < t on the grid");
  require(cp.columns() == x.dim(), ErrorKind::invalid_input, "integrand must have one column per driver component");
  const RowMatrix area = reconstruct_second_level(x, s, t);
  Eigen::VectorXd z = cp.value(s) * x.increment(s, t) + second_order_term(cp.derivative(s), x.dim(), area);
  z.array() *= gen.decay(cp.grid()[t] - cp.grid()[s]);
  return z;
}

std::vector<Eigen::VectorXd> rough_convolution_path(const RoughPath& x, const ControlledPath& cp,
                                                    const Generator& gen) {
  check_shared(x, cp);
  require(cp.columns() == x.dim(), ErrorKind::invalid_input, "integrand must have one column per driver component");
  std::vector<Eigen::VectorXd> out(x.steps() + 1);
  out[0] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cp.modes()));
  for (std::size_t k = 0; k < x.steps(); ++k) {
    Eigen::VectorXd z = out[k] + cp.value(k) * x.increment(k, k + 1) +
                        second_order_term(cp.derivative(k), x.dim(), x.block(k));
    z.array() *= gen.decay(cp.grid().dt(k));
    out[k + 1] = std::move(z);
  }
  return out;
}

Eigen::VectorXd rough_convolution(const RoughPath& x, const ControlledPath& cp, std::size_t s, std::size_t t,
                                  const Generator& gen) {
  check_shared(x, cp);
  require(s < t, ErrorKind::invalid_input, "rough convolution needs s < t");
  require(t <= x.steps(), ErrorKind::invalid_index, "rough convolution index out of range");
  require(cp.columns() == x.dim(), ErrorKind::invalid_input, "integrand must have one column per driver component");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cp.modes()));
  for (std::size_t k = s; k < t; ++k) {
    acc += cp.value(k) * x.increment(k, k + 1) + second_order_term(cp.derivative(k), x.dim(), x.block(k));
    acc.array() *= gen.decay(cp.grid().dt(k));
  }
  return acc;
}

double sewing_defect(const RoughPath& x, const ControlledPath& cp, std::size_t u, std::size_t w, std::size_t v,
                     double alpha, const Generator& gen) {
  require(u < w && w < v, ErrorKind::invalid_input, "sewing defect needs u < w < v");
  Eigen::VectorXd inner = convolution_germ(x, cp, u, w, gen);
  inner.array() *= gen.decay(cp.grid()[v] - cp.grid()[w]);
  const Eigen::VectorXd defect = convolution_germ(x, cp, u, v, gen) - convolution_germ(x, cp, w, v, gen) - inner;
  return norm_alpha(defect, gen, alpha);
}

double sewing_constant(const ControlledNorms& n) noexcept {
  return n.driver_holder * n.remainder_holder + n.area_holder * n.derivative_holder;
}

double measured_intbound_constant(const RoughPath& x, const ControlledPath& cp, double gamma, double alpha,
                                  const Generator& gen) {
  const ControlledNorms norms = controlled_seminorm(cp, x, gamma, alpha, gen);
  const double k = sewing_constant(norms);
  if (k == 0.0) return 0.0;
  const auto z = rough_convolution_path(x, cp, gen);
  const auto prefix = prefix_second_level(x);
  const auto& grid = cp.grid();
  const std::size_t dim = x.dim();
  double worst = 0.0;
  for (const auto [i, j] : holder_pairs(grid.steps()).pairs) {
    const double gap = grid[j] - grid[i];
    const Eigen::ArrayXd decay = gen.decay(gap);
    const Eigen::VectorXd dx = x.increment(i, j);
    RowMatrix area = prefix[j] - prefix[i];
    area.noalias() -= x.increment(0, i) * dx.transpose();
    Eigen::VectorXd germ = cp.value(i) * dx + second_order_term(cp.derivative(i), dim, area);
    germ.array() *= decay;
    Eigen::VectorXd integral = z[j];
    integral.array() -= decay * z[i].array();
    worst = std::max(worst, norm_alpha(integral - germ, gen, alpha) / std::pow(gap, 3.0 * gamma));
  }
  return worst / k;
}

ControlledPath compose_function(const SpectralMap& g, const ControlledPath& cp) {
  require(static_cast<bool>(g.value), ErrorKind::unsupported_coefficient, "coefficient has no value map");
  require(g.has_derivative(), ErrorKind::unsupported_coefficient, "coefficient has no registered derivative");
  require(cp.columns() == 1, ErrorKind::invalid_input, "compose_function needs a vector-valued controlled path");
  const std::size_t points = cp.grid().points();
  const auto d = static_cast<Eigen::Index>(cp.driver_dim());
  std::vector<Eigen::MatrixXd> z(points);
  std::vector<Eigen::MatrixXd> zp(points);
  for (std::size_t i = 0; i < points; ++i) {
    const Eigen::VectorXd y = cp.value(i).col(0);
    z[i] = g.value(y);
    const Eigen::Index k_out = z[i].cols();
    zp[i].resize(z[i].rows(), k_out * d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const Eigen::MatrixXd dir = g.derivative(y, cp.derivative(i).col(j));
      for (Eigen::Index k = 0; k < k_out; ++k) zp[i].col(k * d + j) = dir.col(k);
    }
  }
  return ControlledPath(cp.grid(), cp.driver_dim(), cp.alpha(), std::move(z), std::move(zp));
}

}  // namespace roughavg
