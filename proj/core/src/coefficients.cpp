#include "roughavg/coefficients.hpp"

#include <cmath>
#include <set>

#include "roughavg/error.hpp"
#include "roughavg/rng.hpp"

namespace roughavg {

namespace {

double param(const CoefficientParams& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void check_params(const CoefficientParams& p, const std::set<std::string>& known, const std::string& set_name) {
  for (const auto& [key, value] : p) {
    require(known.count(key) == 1, ErrorKind::configuration,
            "coefficient set '" + set_name + "' has no parameter '" + key + "'");
    require(std::isfinite(value), ErrorKind::configuration, "coefficient parameter '" + key + "' is not finite");
  }
}

std::size_t rank_param(const CoefficientParams& p, std::size_t modes) {
  const double r = param(p, "rank", 2.0);
  require(r >= 1.0 && r == std::floor(r) && static_cast<std::size_t>(r) <= modes, ErrorKind::configuration,
          "coefficient rank must be an integer in [1, modes]");
  return static_cast<std::size_t>(r);
}

double sech2(double v) {
  const double c = std::cosh(v);
  return 1.0 / (c * c);
}

// Shared slow diffusion: column k is (0.3 + 0.1 tanh(x_k)) e_k, k = 0, 1.
constexpr std::size_t kSlowNoise = 2;

void install_g1(CoefficientSet& c) {
  c.d = kSlowNoise;
  const auto n = static_cast<Eigen::Index>(c.modes);
  c.g1 = [n](const Vec& x) {
    Mat out = Mat::Zero(n, kSlowNoise);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(kSlowNoise); ++k) out(k, k) = 0.3 + 0.1 * std::tanh(x[k]);
    return out;
  };
  c.dg1 = [n](const Vec& x, const Vec& v) {
    Mat out = Mat::Zero(n, kSlowNoise);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(kSlowNoise); ++k) out(k, k) = 0.1 * sech2(x[k]) * v[k];
    return out;
  };
}

}  // namespace

SpectralMap CoefficientSet::g1_map() const {
  SpectralMap map;
  map.value = g1;
  map.derivative = dg1;
  return map;
}

CoefficientSet dissipative_ou(std::size_t modes, const CoefficientParams& params) {
  check_params(params, {"kappa", "rank", "p", "f_scale", "g_scale", "sigma"}, "dissipative-ou");
  require(modes >= kSlowNoise, ErrorKind::configuration, "dissipative-ou needs at least 2 modes");
  const double kappa = param(params, "kappa", 0.5);
  const double p = param(params, "p", 0.5);
  const double f_scale = param(params, "f_scale", 0.5);
  const double g_scale = param(params, "g_scale", 0.8);
  const double sigma = param(params, "sigma", 0.5);
  const std::size_t rank = rank_param(params, modes);
  require(kappa >= 0.0, ErrorKind::configuration, "kappa must be nonnegative");

  CoefficientSet c;
  c.name = "dissipative-ou";
  c.modes = modes;
  c.m = rank;
  install_g1(c);
  const auto n = static_cast<Eigen::Index>(modes);
  const auto r = static_cast<Eigen::Index>(rank);

  const auto f = [=](const Vec& x) {
    Vec out = Vec::Zero(n);
    for (Eigen::Index k = 0; k < r; ++k) out[k] = -f_scale * std::tanh(x[k]);
    return out;
  };
  const auto g = [=](const Vec& x) {
    Vec out = Vec::Zero(n);
    for (Eigen::Index k = 0; k < r; ++k) out[k] = g_scale * std::cos(x[k]);
    return out;
  };
  c.f1 = [=](const Vec& x, const Vec& y) {
    Vec out = f(x);
    out.head(r) += p * y.head(r);
    return out;
  };
  c.f2 = [=](const Vec& x, const Vec& y) { return Vec(g(x) - kappa * y); };
  c.g2 = [=](const Vec&, const Vec&) {
    Mat out = Mat::Zero(n, r);
    for (Eigen::Index j = 0; j < r; ++j) out(j, j) = sigma;
    return out;
  };
  c.dxg2 = [=](const Vec&, const Vec&, const Vec&) { return Mat(Mat::Zero(n, r)); };
  c.dyg2 = c.dxg2;
  c.lip_f2 = kappa;
  c.lip_g2 = 0.0;
  for (std::size_t k = 0; k < rank; ++k) c.active_modes.push_back(k);
  c.separable = true;
  c.averaged_drift = [=](const Vec& x, const Generator& gen) {
    Vec out = f(x);
    const Vec gx = g(x);
    for (Eigen::Index k = 0; k < r; ++k) out[k] += p * gx[k] / (gen.eigenvalue(static_cast<std::size_t>(k)) + kappa);
    return out;
  };
  return c;
}

CoefficientSet bounded_nemytskii(std::size_t modes, const CoefficientParams& params) {
  check_params(params, {"a", "c", "sigma", "rank"}, "bounded-nemytskii");
  require(modes >= kSlowNoise, ErrorKind::configuration, "bounded-nemytskii needs at least 2 modes");
  const double a = param(params, "a", 1.0);
  const double cc = param(params, "c", 0.2);
  const double sigma = param(params, "sigma", 0.4);
  const std::size_t rank = rank_param(params, modes);
  require(cc >= 0.0 && sigma >= 0.0, ErrorKind::configuration, "c and sigma must be nonnegative");

  CoefficientSet c;
  c.name = "bounded-nemytskii";
  c.modes = modes;
  c.m = rank;
  install_g1(c);
  const auto n = static_cast<Eigen::Index>(modes);
  const auto r = static_cast<Eigen::Index>(rank);

  // Weights w_k = 1 / (k + 1) on the first `rank` modes.
  Vec w = Vec::Zero(n);
  for (Eigen::Index k = 0; k < r; ++k) w[k] = 1.0 / static_cast<double>(k + 1);

  c.f1 = [=](const Vec& x, const Vec& y) {
    Vec out = Vec::Zero(n);
    for (Eigen::Index k = 0; k < r; ++k) out[k] = a * w[k] * std::tanh(x[k] + y[k]);
    return out;
  };
  c.f2 = [=](const Vec& x, const Vec& y) { return Vec(cc * (x - y).array().tanh()); };
  c.g2 = [=](const Vec& x, const Vec& y) {
    Mat out = Mat::Zero(n, r);
    for (Eigen::Index j = 0; j < r; ++j) out(j, j) = sigma * (1.0 + 0.5 * std::tanh(y[j]) + 0.25 * std::sin(x[j]));
    return out;
  };
  c.dxg2 = [=](const Vec& x, const Vec&, const Vec& v) {
    Mat out = Mat::Zero(n, r);
    for (Eigen::Index j = 0; j < r; ++j) out(j, j) = sigma * 0.25 * std::cos(x[j]) * v[j];
    return out;
  };
  c.dyg2 = [=](const Vec&, const Vec& y, const Vec& v) {
    Mat out = Mat::Zero(n, r);
    for (Eigen::Index j = 0; j < r; ++j) out(j, j) = sigma * 0.5 * sech2(y[j]) * v[j];
    return out;
  };
  c.lip_f2 = cc;
  c.lip_g2 = 0.5 * sigma;
  c.f1_sup = a * w.norm();
  for (std::size_t k = 0; k < rank; ++k) c.active_modes.push_back(k);
  c.separable = true;
  return c;
}

CoefficientSet make_coefficients(const std::string& name, std::size_t modes, const CoefficientParams& params) {
  if (name == "dissipative-ou") return dissipative_ou(modes, params);
  if (name == "bounded-nemytskii") return bounded_nemytskii(modes, params);
  fail(ErrorKind::configuration, "unknown coefficient set '" + name + "'");
}

LipschitzProbe probe_coefficients(const CoefficientSet& c, std::uint64_t seed, std::size_t probes) {
  const CounterRng rng(seed);
  const auto n = static_cast<Eigen::Index>(c.modes);
  std::vector<double> z(static_cast<std::size_t>(4 * n));
  LipschitzProbe out;
  for (std::size_t k = 0; k < probes; ++k) {
    rng.fill_normal(static_cast<std::uint32_t>(k), kStreamPairs + 1, 0, z);
    const Eigen::Map<const Vec> zx(z.data(), n);
    const Eigen::Map<const Vec> zy(z.data() + n, n);
    const Eigen::Map<const Vec> zd(z.data() + 2 * n, n);
    const Vec x = zx;
    // Cycle through probes near y = x, near y = 0 along a single mode (the
    // steepest points of the saturating maps), and well separated pairs.
    Vec y1;
    Vec y2;
    switch (k % 3) {
      case 0:
        y1 = x + 0.05 * zy;
        y2 = y1 + 1e-5 * zd;
        break;
      case 1:
        y1 = 0.05 * zy;
        y2 = y1;
        y2[static_cast<Eigen::Index>((k / 3) % c.modes)] += 1e-5;
        break;
      default:
        y1 = 2.0 * zy;
        y2 = y1 + zd;
        break;
    }
    const double dy = (y1 - y2).norm();
    out.f2 = std::max(out.f2, (c.f2(x, y1) - c.f2(x, y2)).norm() / dy);
    out.g2 = std::max(out.g2, (c.g2(x, y1) - c.g2(x, y2)).norm() / dy);
    out.f1_max = std::max(out.f1_max, c.f1(x, y1).norm());
  }
  return out;
}

}  // namespace roughavg
