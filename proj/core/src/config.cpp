#include "roughavg/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "roughavg/error.hpp"
#include "roughavg/rpde_solver.hpp"

namespace roughavg {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double to_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == v.size() && !v.empty() && std::isfinite(out), ErrorKind::configuration,
          "key '" + key + "' expects a real number, got '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long out = 0;
  const bool digits = !v.empty() && std::isdigit(static_cast<unsigned char>(v[0]));
  try {
    if (digits) out = std::stoull(v, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  require(digits && used == v.size(), ErrorKind::configuration,
          "key '" + key + "' expects a nonnegative integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  fail(ErrorKind::configuration, "key '" + key + "' expects a boolean, got '" + v + "'");
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  std::string s = text;
  for (char& ch : s)
    if (ch == ',') ch = ' ';
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_real("list", tok));
  return out;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  bool eta_given = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::configuration,
            "line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    require(!key.empty(), ErrorKind::configuration, "line " + std::to_string(lineno) + ": empty key");
    require(seen.insert(key).second, ErrorKind::configuration, "duplicate key '" + key + "'");

    if (key.rfind("coef.", 0) == 0) {
      cfg.coefficient_params[key.substr(5)] = to_real(key, value);
    } else if (key.rfind("diag.", 0) == 0) {
      cfg.diag[key.substr(5)] = value;
    } else if (key == "modes") {
      cfg.modes = to_uint(key, value);
    } else if (key == "eigenvalues") {
      cfg.eigenvalues = value;
    } else if (key == "coefficients") {
      cfg.coefficients = value;
    } else if (key == "gamma") {
      cfg.gamma = to_real(key, value);
    } else if (key == "eta") {
      cfg.eta = to_real(key, value);
      eta_given = true;
    } else if (key == "driver") {
      cfg.driver = parse_lift_kind(value);
    } else if (key == "hurst") {
      cfg.hurst = to_real(key, value);
    } else if (key == "steps") {
      cfg.steps = to_uint(key, value);
    } else if (key == "fine_factor") {
      cfg.fine_factor = to_uint(key, value);
    } else if (key == "horizon") {
      cfg.horizon = to_real(key, value);
    } else if (key == "epsilons") {
      cfg.epsilons = parse_real_list(value);
    } else if (key == "delta_rule") {
      cfg.deltas = value == "paper" ? std::vector<double>{} : parse_real_list(value);
    } else if (key == "samples") {
      cfg.samples = to_uint(key, value);
    } else if (key == "frozen_samples") {
      cfg.frozen_samples = to_uint(key, value);
    } else if (key == "t_star") {
      cfg.t_star = to_real(key, value);
    } else if (key == "frozen_step") {
      cfg.frozen_step = to_real(key, value);
    } else if (key == "seed") {
      cfg.seed = to_uint(key, value);
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "workers") {
      cfg.workers = to_uint(key, value);
    } else if (key == "timing") {
      cfg.timing = to_bool(key, value);
    } else if (key == "x0") {
      cfg.x0 = parse_real_list(value);
    } else if (key == "y0") {
      cfg.y0 = parse_real_list(value);
    } else if (key == "drift_oracle") {
      if (value == "auto") cfg.drift_oracle = DriftOracleKind::automatic;
      else if (value == "closed_form") cfg.drift_oracle = DriftOracleKind::closed_form;
      else if (value == "table") cfg.drift_oracle = DriftOracleKind::table;
      else fail(ErrorKind::configuration, "drift_oracle must be auto, closed_form or table");
    } else if (key == "drift.lattice_step") {
      cfg.drift_lattice_step = to_real(key, value);
    } else if (key == "drift.samples") {
      cfg.drift_samples = to_uint(key, value);
    } else if (key == "drift.t_star") {
      cfg.drift_t_star = to_real(key, value);
    } else if (key == "drift.step") {
      cfg.drift_step = to_real(key, value);
    } else {
      fail(ErrorKind::configuration, "unknown key '" + key + "'");
    }
  }
  if (!eta_given) {
    // gamma - 0.1, kept strictly inside (gamma - 1/4, gamma).
    cfg.eta = std::clamp(cfg.gamma - 0.1, cfg.gamma - 0.25 + 1e-6, cfg.gamma - 1e-6);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::configuration, "cannot open config '" + path.string() + "'");
  return parse_config(in);
}

void apply_env_overrides(ExperimentConfig& cfg) {
  if (const char* dir = std::getenv("ROUGHAVG_OUTPUT_DIR"); dir != nullptr && *dir != '\0') cfg.output_dir = dir;
  if (const char* w = std::getenv("ROUGHAVG_WORKERS"); w != nullptr && *w != '\0')
    cfg.workers = to_uint("ROUGHAVG_WORKERS", w);
}

void ExperimentConfig::validate() const {
  const auto check = [](bool ok, const std::string& what) { require(ok, ErrorKind::configuration, what); };
  check(modes >= 2, "modes must be at least 2");
  check(gamma > 1.0 / 3.0 && gamma <= 0.5, "gamma must lie in (1/3, 1/2]");
  check(eta > gamma - 0.25 && eta < gamma, "eta must lie in (gamma - 1/4, gamma)");
  check(steps >= 1 && fine_factor >= 1 && samples >= 1 && frozen_samples >= 1 && workers >= 1 &&
            drift_samples >= 1,
        "counts must be at least 1");
  check(horizon > 0.0, "horizon must be positive");
  check(!epsilons.empty(), "epsilons must not be empty");
  for (double e : epsilons) check(e > 0.0 && e <= 1.0, "epsilons must lie in (0, 1]");
  check(deltas.empty() || deltas.size() == epsilons.size(), "delta_rule needs one delta per epsilon");
  for (double d : deltas) check(d > 0.0, "deltas must be positive");
  check(t_star > 0.0 && frozen_step > 0.0 && drift_t_star > 0.0 && drift_step > 0.0 && drift_lattice_step > 0.0,
        "times and steps must be positive");
  check(x0.size() <= modes && y0.size() <= modes, "initial states have more entries than modes");
  try {
    slow_spec().validate();
  } catch (const Error& e) {
    fail(ErrorKind::configuration, e.what());
  }

  const Generator gen = generator();
  const CoefficientSet c = coefficient_set();
  const H4Check h4 = verify_h4(c, gen);
  check(h4.pass, "coefficient set '" + coefficients + "' fails the spectral gap condition (margin " +
                     std::to_string(h4.margin) + ")");
  if (drift_oracle == DriftOracleKind::closed_form)
    check(static_cast<bool>(c.averaged_drift), "coefficient set has no closed-form averaged drift");
}

Generator ExperimentConfig::generator() const {
  try {
    return Generator::from_rule(eigenvalues, modes);
  } catch (const Error& e) {
    fail(ErrorKind::configuration, e.what());
  }
}

CoefficientSet ExperimentConfig::coefficient_set() const {
  return make_coefficients(coefficients, modes, coefficient_params);
}

TimeGrid ExperimentConfig::grid() const { return TimeGrid::uniform(horizon, steps); }

LiftSpec ExperimentConfig::slow_spec() const {
  LiftSpec spec;
  spec.kind = driver;
  spec.hurst = hurst;
  spec.fine_factor = fine_factor;
  spec.seed = seed;
  spec.gamma = gamma;
  return spec;
}

LiftSpec ExperimentConfig::fast_spec() const {
  LiftSpec spec;
  spec.kind = LiftKind::brownian_ito;
  spec.fine_factor = fine_factor;
  spec.seed = seed;
  spec.gamma = gamma;
  return spec;
}

namespace {

Vec padded(const std::vector<double>& v, std::size_t modes) {
  Vec out = Vec::Zero(static_cast<Eigen::Index>(modes));
  for (std::size_t k = 0; k < v.size() && k < modes; ++k) out[static_cast<Eigen::Index>(k)] = v[k];
  return out;
}

}  // namespace

Vec ExperimentConfig::initial_x() const { return padded(x0, modes); }
Vec ExperimentConfig::initial_y() const { return padded(y0, modes); }

double ExperimentConfig::diag_double(const std::string& key, double fallback) const {
  const auto it = diag.find(key);
  return it == diag.end() ? fallback : to_real("diag." + key, it->second);
}

std::size_t ExperimentConfig::diag_size(const std::string& key, std::size_t fallback) const {
  const auto it = diag.find(key);
  return it == diag.end() ? fallback : static_cast<std::size_t>(to_uint("diag." + key, it->second));
}

}  // namespace roughavg
