#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "roughavg/config.hpp"
#include "roughavg/error.hpp"
#include "roughavg/experiment.hpp"
#include "roughavg/rough_path.hpp"

namespace ra = roughavg;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

ra::ExperimentConfig load(const std::string& path) {
  ra::ExperimentConfig cfg = ra::load_config(path);
  ra::apply_env_overrides(cfg);
  cfg.validate();
  return cfg;
}

int cmd_sweep(const std::string& path) {
  const ra::ExperimentConfig cfg = load(path);
  const auto start = std::chrono::steady_clock::now();
  const ra::SweepReport report = ra::run_sweep(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::filesystem::create_directories(cfg.output_dir);
  {
    std::ofstream out(cfg.output_dir / "sweep.csv", std::ios::binary | std::ios::trunc);
    ra::write_sweep_csv(out, report, cfg.timing);
  }
  {
    std::ofstream out(cfg.output_dir / "timing.csv", std::ios::binary | std::ios::trunc);
    out << "epsilon,seconds\n";
    for (const auto& r : report.rows) out << ra::format_real(r.epsilon) << ',' << ra::format_real(r.seconds) << '\n';
    out << "total," << ra::format_real(wall) << '\n';
  }
  std::size_t blowups = 0;
  for (const auto& r : report.rows) {
    blowups += r.blowups;
    std::printf("eps=%-8g delta=%-10.6g mean=%-12.6g stderr=%-12.6g blowups=%zu seconds=%.2f\n", r.epsilon, r.delta,
                r.mean, r.stderr, r.blowups, r.seconds);
  }
  std::printf("drift=%s", report.drift_source.c_str());
  if (report.drift_source == "table")
    std::printf(" nodes=%zu stderr=%.3g quantization=%.3g", report.drift_nodes, report.drift_stderr,
                report.drift_quantization);
  std::printf("\nnonincreasing=%s final/initial=%.4g blowups=%zu wall=%.1fs\n%s\n",
              report.nonincreasing ? "yes" : "no", report.final_over_initial, blowups, wall,
              report.pass ? "PASS" : "FAIL");
  return report.pass ? kExitPass : kExitFail;
}

int cmd_diag(const std::string& path, const std::string& name) {
  const ra::ExperimentConfig cfg = load(path);
  const ra::DiagReport report = ra::run_diag(cfg, name);
  ra::write_table(cfg.output_dir, "diag_" + name, report.table);
  for (const auto& [key, value] : report.metrics) std::printf("%s=%.17g\n", key.c_str(), value);
  std::printf("%s %s\n", name.c_str(), report.pass ? "PASS" : "FAIL");
  return report.pass ? kExitPass : kExitFail;
}

int cmd_lift(const std::string& path, unsigned sample) {
  const ra::ExperimentConfig cfg = load(path);
  const ra::RoughPath xi = ra::lift_from_config(cfg, sample);
  std::filesystem::create_directories(cfg.output_dir);
  const auto file = cfg.output_dir / "xi.rpth";
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  ra::write_rough_path(out, xi);
  ra::require(static_cast<bool>(out), ra::ErrorKind::configuration, "cannot write " + file.string());
  std::printf("wrote %s dim=%zu steps=%zu chen_residual=%.3g\n", file.c_str(), xi.dim(), xi.steps(),
              ra::chen_residual(xi));
  return kExitPass;
}

int cmd_drift(const std::string& path, const std::string& vector_file) {
  const ra::ExperimentConfig cfg = load(path);
  std::ifstream in(vector_file);
  ra::require(static_cast<bool>(in), ra::ErrorKind::configuration, "cannot open " + vector_file);
  std::stringstream text;
  text << in.rdbuf();
  const std::vector<double> values = ra::parse_real_list(text.str());
  ra::Vec x = ra::Vec::Zero(static_cast<Eigen::Index>(cfg.modes));
  ra::require(values.size() <= cfg.modes, ra::ErrorKind::configuration, "vector has more entries than modes");
  for (std::size_t i = 0; i < values.size(); ++i) x(static_cast<Eigen::Index>(i)) = values[i];
  const ra::AveragedDriftEstimate est = ra::drift_from_config(cfg, x);
  std::printf("samples=%zu burn_in=%.17g stderr=%.17g\nmode,value\n", est.samples, est.burn_in, est.stderr);
  for (std::size_t i = 0; i < est.value.size(); ++i) std::printf("%zu,%.17g\n", i, est.value[i]);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Averaging experiments for slow-fast rough SPDEs"};
  app.require_subcommand(1);
  std::string config;
  std::string name;
  std::string vector_file;
  unsigned sample = 0;

  auto* sweep = app.add_subcommand("sweep", "epsilon sweep of the averaging error");
  sweep->add_option("config", config)->required()->check(CLI::ExistingFile);
  auto* diag = app.add_subcommand("diag", "run a named diagnostic suite");
  diag->add_option("config", config)->required()->check(CLI::ExistingFile);
  diag->add_option("name", name)->required();
  auto* lift = app.add_subcommand("lift", "dump the mixed rough path of one sample");
  lift->add_option("config", config)->required()->check(CLI::ExistingFile);
  lift->add_option("--sample", sample, "sample index");
  auto* drift = app.add_subcommand("drift", "ensemble estimate of the averaged drift");
  drift->add_option("config", config)->required()->check(CLI::ExistingFile);
  drift->add_option("--x", vector_file, "file with the leading modes of x")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (*sweep) return cmd_sweep(config);
    if (*diag) return cmd_diag(config, name);
    if (*lift) return cmd_lift(config, sample);
    return cmd_drift(config, vector_file);
  } catch (const ra::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.kind()) {
      case ra::ErrorKind::configuration:
      case ra::ErrorKind::usage:
      case ra::ErrorKind::invalid_input:
      case ra::ErrorKind::unsupported_coefficient:
        return kExitConfig;
      default:
        return kExitFail;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFail;
  }
}
