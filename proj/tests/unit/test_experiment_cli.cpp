#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "roughavg/config.hpp"
#include "roughavg/diagnostics.hpp"
#include "roughavg/error.hpp"
#include "roughavg/experiment.hpp"

using namespace roughavg;
namespace fs = std::filesystem;

namespace {

bool throws_kind(ErrorKind kind, const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

// Small enough to run in a couple of seconds.
ExperimentConfig small_config(const std::string& extra = "", int samples = 6) {
  return parse(
      "modes = 8\n"
      "steps = 256\n"
      "fine_factor = 4\n"
      "epsilons = 0.1, 0.01\n"
      "samples = " + std::to_string(samples) + "\n" +
      extra);
}

std::string sweep_csv(const ExperimentConfig& cfg) {
  std::ostringstream out;
  write_sweep_csv(out, run_sweep(cfg), cfg.timing);
  return out.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("roughavg_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(ROUGHAVG_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig cfg = parse(
      "# comment line\n"
      "modes = 16   # trailing comment\n"
      "coefficients = \"bounded-nemytskii\"\n"
      "coef.sigma = 0.3\n"
      "gamma = 0.45\n"
      "epsilons = 0.1 0.01, 0.001\n"
      "delta_rule = 0.5, 0.25, 0.125\n"
      "driver = brownian_ito\n"
      "diag.samples = 12\n"
      "x0 = 1, 2, 3\n");
  CHECK(cfg.modes == 16);
  CHECK(cfg.coefficients == "bounded-nemytskii");
  CHECK(cfg.coefficient_params.at("sigma") == 0.3);
  CHECK(cfg.epsilons.size() == 3);
  CHECK(cfg.deltas.size() == 3);
  CHECK(cfg.driver == LiftKind::brownian_ito);
  CHECK(cfg.diag_size("samples", 1) == 12);
  CHECK(cfg.diag_double("missing", 2.5) == 2.5);
  CHECK(cfg.initial_x().size() == 16);
  CHECK(cfg.initial_x()[2] == 3.0);
  // eta defaults to gamma - 0.1 inside (gamma - 1/4, gamma).
  CHECK(cfg.eta == doctest::Approx(0.35));
  CHECK_NOTHROW(cfg.validate());
  CHECK(parse("delta_rule = paper\n").deltas.empty());

  CHECK(throws_kind(ErrorKind::configuration, [] { (void)parse("modes = 4\nmodes = 5\n"); }));
  CHECK(throws_kind(ErrorKind::configuration, [] { (void)parse("colour = blue\n"); }));
  CHECK(throws_kind(ErrorKind::configuration, [] { (void)parse("modes 4\n"); }));
  CHECK(throws_kind(ErrorKind::configuration, [] { (void)parse("steps = -3\n"); }));
}

TEST_CASE("config validation") {
  const auto invalid = [](const std::string& text) {
    return throws_kind(ErrorKind::configuration, [&] { parse(text).validate(); });
  };
  CHECK(invalid("gamma = 0.3\n"));
  CHECK(invalid("gamma = 0.55\n"));
  CHECK(invalid("gamma = 0.4\neta = 0.4\n"));
  CHECK(invalid("gamma = 0.4\neta = 0.1\n"));
  CHECK(invalid("samples = 0\n"));
  CHECK(invalid("coef.kappa = 1.0\n"));
  CHECK(invalid("coefficients = unknown\n"));
  CHECK(invalid("epsilons = 0.1, 0.01\ndelta_rule = 0.5\n"));
  CHECK(invalid("hurst = 0.3\n"));
  CHECK(invalid("coefficients = bounded-nemytskii\ndrift_oracle = closed_form\n"));
  CHECK_NOTHROW(parse("").validate());
}

TEST_CASE("environment overrides") {
  ExperimentConfig cfg;
  setenv("ROUGHAVG_OUTPUT_DIR", "/tmp/roughavg_override", 1);
  setenv("ROUGHAVG_WORKERS", "3", 1);
  apply_env_overrides(cfg);
  unsetenv("ROUGHAVG_OUTPUT_DIR");
  unsetenv("ROUGHAVG_WORKERS");
  CHECK(cfg.output_dir == fs::path("/tmp/roughavg_override"));
  CHECK(cfg.workers == 3);
}

TEST_CASE("sweep with a fast-state independent drift has no averaging error") {
  const ExperimentConfig cfg = small_config("coef.p = 0\n", 1);
  const SweepReport r = run_sweep(cfg);
  CHECK(r.drift_source == "closed_form");
  for (const SweepRow& row : r.rows) {
    CHECK(row.mean <= 1e-24);
    CHECK(row.blowups == 0);
  }
}

TEST_CASE("sweep output is deterministic across runs and worker counts") {
  const ExperimentConfig one = small_config();
  const std::string a = sweep_csv(one);
  CHECK(a == sweep_csv(one));
  const ExperimentConfig four = small_config("workers = 4\n");
  CHECK(a == sweep_csv(four));
  const ExperimentConfig table = small_config("coefficients = bounded-nemytskii\ndrift.samples = 32\n", 3);
  const ExperimentConfig table4 = small_config("coefficients = bounded-nemytskii\ndrift.samples = 32\nworkers = 3\n", 3);
  CHECK(sweep_csv(table) == sweep_csv(table4));

  std::istringstream lines(a);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "epsilon,delta,mc_mean_sq_error,mc_stderr,blowups,seconds");
  std::string row;
  std::getline(lines, row);
  CHECK(row.rfind("0.10000000000000001,", 0) == 0);
  CHECK(row.substr(row.size() - 2) == ",0");
}

TEST_CASE("sweep reports the scheduled delta") {
  const SweepReport r = run_sweep(small_config());
  CHECK(r.rows[0].delta == doctest::Approx(std::ceil(delta_schedule(0.1, 0.4) * 256) / 256));
  const SweepReport explicit_delta = run_sweep(small_config("delta_rule = 0.25, 0.125\n"));
  CHECK(explicit_delta.rows[1].delta == 0.125);
}

TEST_CASE("diag dispatch") {
  const ExperimentConfig cfg = small_config();
  CHECK(throws_kind(ErrorKind::usage, [&] { (void)run_diag(cfg, "nonsense"); }));
  const ExperimentConfig chen = small_config("diag.seeds = 5\ndiag.steps = 32\n");
  const DiagReport r = run_diag(chen, "chen");
  CHECK(r.pass);
  CHECK(r.metric("max_residual") <= 1e-12);
  CHECK(throws_kind(ErrorKind::invalid_input, [&] { (void)r.metric("absent"); }));
  CHECK(diag_names().size() == 9);
}

TEST_CASE("command line exit codes and outputs") {
  const fs::path dir = scratch("cli");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "modes = 8\nsteps = 128\nfine_factor = 4\nsamples = 4\nepsilons = 0.1, 0.01\ndiag.seeds = 4\ndiag.steps = 32\nfrozen_samples = 64\n"
        << "output_dir = " << (dir / "out").string() << "\n";
    std::ofstream bad(dir / "bad.cfg");
    bad << "gamma = 0.9\n";
    std::ofstream x(dir / "x.txt");
    x << "0.5 -0.5\n";
  }
  const std::string cfg = (dir / "run.cfg").string();
  CHECK(run_cli("diag " + cfg + " chen") == 0);
  CHECK(fs::exists(dir / "out" / "diag_chen.csv"));
  CHECK(run_cli("diag " + cfg + " nonsense") == 2);
  CHECK(run_cli("sweep " + (dir / "bad.cfg").string()) == 2);
  CHECK(run_cli("lift " + cfg) == 0);
  CHECK(fs::file_size(dir / "out" / "xi.rpth") > 0);
  CHECK(run_cli("drift " + cfg + " --x " + (dir / "x.txt").string()) == 0);
  CHECK(run_cli("frobnicate") == 2);
  // A sweep that misses the convergence threshold exits with 1.
  const int code = run_cli("sweep " + cfg);
  CHECK((code == 0 || code == 1));
  CHECK(fs::exists(dir / "out" / "sweep.csv"));
  CHECK(fs::exists(dir / "out" / "timing.csv"));
  // Shipped configs parse and validate.
  for (const char* name : {"dissipative_ou.cfg", "bounded_nemytskii.cfg"}) CHECK_NOTHROW(load_config(fs::path(ROUGHAVG_CONFIG_DIR) / name).validate());
}
