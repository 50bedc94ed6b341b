#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "roughavg/grid.hpp"

namespace roughavg {

/// Element of the truncated state space, stored as coefficients in the
/// eigenbasis e_1..e_N of -A.
class SpectralVector {
 public:
  SpectralVector() = default;
  explicit SpectralVector(std::size_t modes) : c_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(modes))) {}
  /// Throws invalid-input if any coefficient is non-finite.
  explicit SpectralVector(Eigen::VectorXd coeffs);

  static SpectralVector unit(std::size_t modes, std::size_t k);

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(c_.size()); }
  [[nodiscard]] double operator[](std::size_t k) const { return c_[static_cast<Eigen::Index>(k)]; }
  [[nodiscard]] double& operator[](std::size_t k) { return c_[static_cast<Eigen::Index>(k)]; }
  [[nodiscard]] const Eigen::VectorXd& coeffs() const noexcept { return c_; }
  [[nodiscard]] Eigen::VectorXd& coeffs() noexcept { return c_; }
  [[nodiscard]] bool all_finite() const noexcept { return c_.allFinite(); }

  SpectralVector& operator+=(const SpectralVector& o) { c_ += o.c_; return *this; }
  SpectralVector& operator-=(const SpectralVector& o) { c_ -= o.c_; return *this; }
  SpectralVector& operator*=(double s) { c_ *= s; return *this; }

  friend SpectralVector operator+(SpectralVector a, const SpectralVector& b) { return a += b; }
  friend SpectralVector operator-(SpectralVector a, const SpectralVector& b) { return a -= b; }
  friend SpectralVector operator*(double s, SpectralVector a) { return a *= s; }
  friend bool operator==(const SpectralVector& a, const SpectralVector& b) { return a.c_ == b.c_; }

 private:
  Eigen::VectorXd c_;
};

/// Diagonal generator A e_n = -lambda_n e_n.
class Generator {
 public:
  /// Eigenvalues must be finite, positive and nondecreasing, with
  /// lambda_1 >= 1 unless `allow_subunit` (used only to express A = 0 style
  /// degenerate cases in tests, where nonnegativity is still required).
  explicit Generator(std::vector<double> eigenvalues, bool allow_subunit = false);

  /// Dirichlet Laplacian on (0, pi): lambda_n = n^2.
  static Generator dirichlet_laplacian(std::size_t modes);

  /// `rule` is "n^2" (or "n^p" for a positive real p) or an explicit
  /// comma/space separated list; a list must have exactly `modes` entries.
  static Generator from_rule(std::string_view rule, std::size_t modes);

  [[nodiscard]] std::size_t modes() const noexcept { return lambda_.size(); }
  [[nodiscard]] double eigenvalue(std::size_t k) const noexcept { return lambda_[static_cast<Eigen::Index>(k)]; }
  [[nodiscard]] double smallest() const noexcept { return lambda_[0]; }
  [[nodiscard]] const Eigen::ArrayXd& eigenvalues() const noexcept { return lambda_; }

  /// e^{-lambda_n t} for every mode.
  [[nodiscard]] Eigen::ArrayXd decay(double t) const;
  /// lambda_n^{power}.
  [[nodiscard]] Eigen::ArrayXd power(double p) const;

 private:
  Eigen::ArrayXd lambda_;
};

/// ||v||_{H_alpha} = sqrt(sum lambda_n^{2 alpha} c_n^2).
[[nodiscard]] double norm_alpha(const SpectralVector& v, const Generator& gen, double alpha);
[[nodiscard]] double norm_alpha(const Eigen::Ref<const Eigen::VectorXd>& v, const Generator& gen, double alpha);
/// Hilbert-Schmidt norm of a column family (N x K) in H_alpha^K.
[[nodiscard]] double norm_alpha_columns(const Eigen::Ref<const Eigen::MatrixXd>& v, const Generator& gen,
                                        double alpha);

/// S_t v. Throws invalid-input for t < 0.
[[nodiscard]] SpectralVector apply_semigroup(double t, const SpectralVector& v, const Generator& gen);
/// Column-wise S_t in place.
void apply_semigroup_inplace(double t, Eigen::Ref<Eigen::MatrixXd> v, const Generator& gen);

/// sup_n lambda_n^{alpha-beta} e^{-lambda_n t}; requires alpha >= beta, t > 0.
[[nodiscard]] double smoothing_bound_check(const Generator& gen, double alpha, double beta, double t);
/// ((alpha-beta)/e)^{alpha-beta}: sharp constant of x^{a} e^{-x} on x > 0.
[[nodiscard]] double smoothing_sharp_constant(double alpha, double beta);

/// sup_n lambda_n^{-sigma} |e^{-lambda_n t} - 1|, the operator norm of
/// (S_t - Id) from H_beta to H_{beta - sigma} on the truncated space.
[[nodiscard]] double identity_gap_norm(const Generator& gen, double sigma, double t);

/// Semigroup factors e^{-lambda (t_j - t_i)} for pairs of grid points.
/// Uniform grids use a precomputed N x (n+1) table indexed by gap.
class SemigroupTable {
 public:
  SemigroupTable(const Generator& gen, const TimeGrid& grid);

  [[nodiscard]] Eigen::ArrayXd factors(std::size_t i, std::size_t j) const;
  /// Scales v in place by e^{-lambda (t_j - t_i)}.
  void apply(std::size_t i, std::size_t j, Eigen::Ref<Eigen::VectorXd> v) const;

  [[nodiscard]] const Generator& generator() const noexcept { return gen_; }
  [[nodiscard]] const TimeGrid& grid() const noexcept { return grid_; }

 private:
  Generator gen_;
  TimeGrid grid_;
  Eigen::MatrixXd by_gap_;  // column k = e^{-lambda k h}; empty for non-uniform grids
};

}  // namespace roughavg
