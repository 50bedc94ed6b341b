#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "roughavg/coefficients.hpp"
#include "roughavg/grid.hpp"
#include "roughavg/lift.hpp"
#include "roughavg/spectral_space.hpp"

namespace roughavg {

enum class DriftOracleKind { automatic, closed_form, table };

/// Flat `key = value` experiment configuration. See README for the keys.
struct ExperimentConfig {
  std::size_t modes = 32;
  std::string eigenvalues = "n^2";
  std::string coefficients = "dissipative-ou";
  CoefficientParams coefficient_params;

  double gamma = 0.4;
  double eta = 0.3;
  LiftKind driver = LiftKind::fbm;
  double hurst = 0.45;

  std::size_t steps = 4096;
  std::size_t fine_factor = 64;
  double horizon = 1.0;
  std::vector<double> epsilons = {1e-1, 3e-2, 1e-2, 3e-3};
  /// Empty means the built-in delta schedule; otherwise one delta per epsilon.
  std::vector<double> deltas;

  std::size_t samples = 64;
  std::size_t frozen_samples = 1024;
  double t_star = 8.0;
  double frozen_step = 0.005;

  std::uint64_t seed = 20240601;
  std::filesystem::path output_dir = "out";
  std::size_t workers = 1;
  bool timing = false;

  std::vector<double> x0 = {0.5, -0.5};  ///< leading modes; the rest are zero
  std::vector<double> y0;

  DriftOracleKind drift_oracle = DriftOracleKind::automatic;
  double drift_lattice_step = 0.05;
  std::size_t drift_samples = 256;
  double drift_t_star = 4.0;
  double drift_step = 0.01;

  /// Free-form `diag.*` overrides, keyed without the prefix.
  std::map<std::string, std::string> diag;

  /// Throws configuration errors for out-of-range values, including a
  /// failed spectral gap check for the named coefficient set.
  void validate() const;

  [[nodiscard]] Generator generator() const;
  [[nodiscard]] CoefficientSet coefficient_set() const;
  [[nodiscard]] TimeGrid grid() const;
  [[nodiscard]] LiftSpec slow_spec() const;
  [[nodiscard]] LiftSpec fast_spec() const;
  [[nodiscard]] Vec initial_x() const;
  [[nodiscard]] Vec initial_y() const;

  [[nodiscard]] double diag_double(const std::string& key, double fallback) const;
  [[nodiscard]] std::size_t diag_size(const std::string& key, std::size_t fallback) const;
};

[[nodiscard]] ExperimentConfig parse_config(std::istream& in);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// ROUGHAVG_OUTPUT_DIR and ROUGHAVG_WORKERS.
void apply_env_overrides(ExperimentConfig& cfg);

/// Comma or whitespace separated reals.
[[nodiscard]] std::vector<double> parse_real_list(const std::string& text);

}  // namespace roughavg
