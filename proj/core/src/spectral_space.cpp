#include "roughavg/spectral_space.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "roughavg/error.hpp"

namespace roughavg {

SpectralVector::SpectralVector(Eigen::VectorXd coeffs) : c_(std::move(coeffs)) {
  require(c_.allFinite(), ErrorKind::invalid_input, "spectral vector has non-finite coefficients");
}

SpectralVector SpectralVector::unit(std::size_t modes, std::size_t k) {
  require(k < modes, ErrorKind::invalid_index, "unit vector index out of range");
  SpectralVector v(modes);
  v[k] = 1.0;
  return v;
}

Generator::Generator(std::vector<double> eigenvalues, bool allow_subunit)
    : lambda_(Eigen::Map<const Eigen::ArrayXd>(eigenvalues.data(), static_cast<Eigen::Index>(eigenvalues.size()))) {
  require(!eigenvalues.empty(), ErrorKind::invalid_input, "generator needs at least one mode");
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    const double l = eigenvalues[k];
    require(std::isfinite(l), ErrorKind::invalid_input, "eigenvalues must be finite");
    require(allow_subunit ? l >= 0.0 : l > 0.0, ErrorKind::invalid_input, "eigenvalues must be positive");
    if (k > 0) {
      require(l >= eigenvalues[k - 1], ErrorKind::invalid_input, "eigenvalues must be nondecreasing");
    }
  }
  require(allow_subunit || eigenvalues.front() >= 1.0, ErrorKind::invalid_input,
          "smallest eigenvalue must be at least 1");
}

Generator Generator::dirichlet_laplacian(std::size_t modes) {
  std::vector<double> l(modes);
  for (std::size_t n = 1; n <= modes; ++n) l[n - 1] = static_cast<double>(n * n);
  return Generator(std::move(l));
}

Generator Generator::from_rule(std::string_view rule, std::size_t modes) {
  std::string r(rule);
  r.erase(0, r.find_first_not_of(" \t\""));
  r.erase(r.find_last_not_of(" \t\"") + 1);
  if (r.rfind("n^", 0) == 0) {
    double p = 0.0;
    try {
      p = std::stod(r.substr(2));
    } catch (const std::exception&) {
      fail(ErrorKind::configuration, "bad eigenvalue rule '" + r + "'");
    }
    require(p > 0.0, ErrorKind::configuration, "eigenvalue rule exponent must be positive");
    std::vector<double> l(modes);
    for (std::size_t n = 1; n <= modes; ++n) l[n - 1] = std::pow(static_cast<double>(n), p);
    return Generator(std::move(l));
  }
  for (char& ch : r) {
    if (ch == ',') ch = ' ';
  }
  std::istringstream in(r);
  std::vector<double> l;
  double v = 0.0;
  while (in >> v) l.push_back(v);
  require(in.eof(), ErrorKind::configuration, "bad eigenvalue list '" + std::string(rule) + "'");
  require(l.size() == modes, ErrorKind::configuration,
          "eigenvalue list has " + std::to_string(l.size()) + " entries, expected " + std::to_string(modes));
  return Generator(std::move(l));
}

Eigen::ArrayXd Generator::decay(double t) const { return (-lambda_ * t).exp(); }

Eigen::ArrayXd Generator::power(double p) const {
  Eigen::ArrayXd out(lambda_.size());
  for (Eigen::Index k = 0; k < lambda_.size(); ++k) out[k] = std::pow(lambda_[k], p);
  return out;
}

double norm_alpha(const Eigen::Ref<const Eigen::VectorXd>& v, const Generator& gen, double alpha) {
  require(std::isfinite(alpha), ErrorKind::invalid_input, "alpha must be finite");
  require(v.allFinite(), ErrorKind::invalid_input, "vector has non-finite coefficients");
  require(static_cast<std::size_t>(v.size()) == gen.modes(), ErrorKind::invalid_input,
          "vector and generator sizes differ");
  if (alpha == 0.0) return v.norm();
  return (gen.power(alpha) * v.array()).matrix().norm();
}

double norm_alpha(const SpectralVector& v, const Generator& gen, double alpha) {
  return norm_alpha(v.coeffs(), gen, alpha);
}

double norm_alpha_columns(const Eigen::Ref<const Eigen::MatrixXd>& v, const Generator& gen, double alpha) {
  require(std::isfinite(alpha), ErrorKind::invalid_input, "alpha must be finite");
  if (alpha == 0.0) return v.norm();
  return (v.array().colwise() * gen.power(alpha)).matrix().norm();
}

SpectralVector apply_semigroup(double t, const SpectralVector& v, const Generator& gen) {
  require(t >= 0.0 && std::isfinite(t), ErrorKind::invalid_input, "semigroup time must be nonnegative");
  require(v.size() == gen.modes(), ErrorKind::invalid_input, "vector and generator sizes differ");
  if (t == 0.0) return v;
  return SpectralVector((gen.decay(t) * v.coeffs().array()).matrix());
}

void apply_semigroup_inplace(double t, Eigen::Ref<Eigen::MatrixXd> v, const Generator& gen) {
  require(t >= 0.0 && std::isfinite(t), ErrorKind::invalid_input, "semigroup time must be nonnegative");
  if (t == 0.0) return;
  v.array().colwise() *= gen.decay(t);
}

double smoothing_bound_check(const Generator& gen, double alpha, double beta, double t) {
  require(alpha >= beta, ErrorKind::invalid_input, "smoothing bound needs alpha >= beta");
  require(t > 0.0 && std::isfinite(t), ErrorKind::invalid_input, "smoothing bound needs t > 0");
  const double gap = alpha - beta;
  double best = 0.0;
  for (std::size_t k = 0; k < gen.modes(); ++k) {
    const double l = gen.eigenvalue(k);
    best = std::max(best, std::pow(l, gap) * std::exp(-l * t));
  }
  return best;
}

double smoothing_sharp_constant(double alpha, double beta) {
  const double gap = alpha - beta;
  if (gap == 0.0) return 1.0;
  return std::pow(gap / std::exp(1.0), gap);
}

double identity_gap_norm(const Generator& gen, double sigma, double t) {
  require(t >= 0.0, ErrorKind::invalid_input, "time must be nonnegative");
  double best = 0.0;
  for (std::size_t k = 0; k < gen.modes(); ++k) {
    const double l = gen.eigenvalue(k);
    if (l == 0.0) continue;
    best = std::max(best, std::pow(l, -sigma) * (-std::expm1(-l * t)));
  }
  return best;
}

SemigroupTable::SemigroupTable(const Generator& gen, const TimeGrid& grid) : gen_(gen), grid_(grid) {
  if (grid_.is_uniform()) {
    const auto n = static_cast<Eigen::Index>(grid_.points());
    by_gap_.resize(static_cast<Eigen::Index>(gen_.modes()), n);
    const double h = grid_.step();
    for (Eigen::Index k = 0; k < n; ++k) {
      by_gap_.col(k) = gen_.decay(h * static_cast<double>(k)).matrix();
    }
  }
}

Eigen::ArrayXd SemigroupTable::factors(std::size_t i, std::size_t j) const {
  require(i <= j && j < grid_.points(), ErrorKind::invalid_index, "semigroup table index order");
  if (by_gap_.size() > 0) return by_gap_.col(static_cast<Eigen::Index>(j - i)).array();
  return gen_.decay(grid_[j] - grid_[i]);
}

void SemigroupTable::apply(std::size_t i, std::size_t j, Eigen::Ref<Eigen::VectorXd> v) const {
  if (by_gap_.size() > 0) {
    v.array() *= by_gap_.col(static_cast<Eigen::Index>(j - i)).array();
  } else {
    v.array() *= gen_.decay(grid_[j] - grid_[i]);
  }
}

}  // namespace roughavg
