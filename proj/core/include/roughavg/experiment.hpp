#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "roughavg/averaging.hpp"
#include "roughavg/config.hpp"
#include "roughavg/diagnostics.hpp"
#include "roughavg/rough_path.hpp"

namespace roughavg {

struct SweepRow {
  double epsilon = 0.0;
  double delta = 0.0;
  double mean = 0.0;    ///< mean over samples of the squared reduced-Hoelder error
  double stderr = 0.0;
  std::size_t blowups = 0;
  double seconds = 0.0;  ///< summed per-sample solve time (nondeterministic)
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::string drift_source;        ///< "closed_form" or "table"
  double drift_stderr = 0.0;       ///< worst node stderr of the drift table
  double drift_quantization = 0.0;
  std::size_t drift_nodes = 0;
  bool nonincreasing = false;      ///< each step up by less than 2 paired stderr
  double final_over_initial = 0.0;
  bool pass = false;               ///< nonincreasing and final_over_initial <= 1/4
};

/// The averaging sweep: per sample one mixed lift, one averaged solve and
/// one slow-fast solve per epsilon, all sharing B.
[[nodiscard]] SweepReport run_sweep(const ExperimentConfig& cfg);

/// sweep.csv; the seconds column is written as 0 unless `timing`.
void write_sweep_csv(std::ostream& out, const SweepReport& report, bool timing);

/// Names accepted by run_diag.
[[nodiscard]] const std::vector<std::string>& diag_names();

/// Named property suite with parameters from the config (and diag.* keys).
/// Unknown names give a usage error.
[[nodiscard]] DiagReport run_diag(const ExperimentConfig& cfg, const std::string& name);

/// Mixed lift of sample `sample` under the config's drivers.
[[nodiscard]] RoughPath lift_from_config(const ExperimentConfig& cfg, std::uint32_t sample = 0);

/// Ensemble averaged drift at x with the config's frozen-ensemble settings.
[[nodiscard]] AveragedDriftEstimate drift_from_config(const ExperimentConfig& cfg, const Vec& x);

/// Writes `name`.csv into dir (created if missing).
void write_table(const std::filesystem::path& dir, const std::string& name, const CsvTable& table);

}  // namespace roughavg
