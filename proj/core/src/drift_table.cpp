#include "roughavg/drift_table.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "roughavg/averaging.hpp"
#include "roughavg/error.hpp"

namespace roughavg {

using Key = std::vector<long>;

struct DriftTable::State {
  CoefficientSet c;
  Generator gen;
  DriftTableOptions opts;
  std::size_t axes = 0;

  mutable std::mutex mutex;
  mutable std::map<Key, AveragedDriftEstimate> cache;

  State(CoefficientSet coef, Generator g, DriftTableOptions o)
      : c(std::move(coef)), gen(std::move(g)), opts(o) {}

  Vec node_point(const Key& key) const {
    Vec x = Vec::Zero(static_cast<Eigen::Index>(c.modes));
    for (std::size_t a = 0; a < c.active_modes.size(); ++a) {
      const long k = c.separable ? key[0] : key[a];
      x[static_cast<Eigen::Index>(c.active_modes[a])] = static_cast<double>(k) * opts.lattice_step;
    }
    return x;
  }

  const AveragedDriftEstimate& node(const Key& key) const {
    {
      std::lock_guard lock(mutex);
      const auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    AveragedDriftEstimate est =
        averaged_drift(node_point(key), c, gen, opts.t_star, opts.samples, opts.step, opts.seed, opts.decay_slope);
    std::vector<bool> active(c.modes, false);
    for (std::size_t k : c.active_modes) active[k] = true;
    for (std::size_t k = 0; k < c.modes; ++k)
      require(active[k] || est.value[k] == 0.0, ErrorKind::configuration,
              "averaged drift has support outside the active modes");
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(est)).first->second;
  }
};

DriftTable::DriftTable(CoefficientSet c, Generator gen, DriftTableOptions opts) {
  require(opts.lattice_step > 0.0, ErrorKind::configuration, "drift lattice step must be positive");
  require(!c.active_modes.empty(), ErrorKind::configuration, "coefficient set declares no active modes");
  for (std::size_t k : c.active_modes)
    require(k < c.modes, ErrorKind::configuration, "active mode out of range");
  if (opts.decay_slope == 0.0) {
    const auto n = static_cast<Eigen::Index>(c.modes);
    const Vec zero = Vec::Zero(n);
    const Vec ones = Vec::Ones(n);
    opts.decay_slope = ergodicity_decay(zero, zero, ones, c, gen, 10.0, opts.step, 64, opts.seed).slope;
  }
  state_ = std::make_shared<State>(std::move(c), std::move(gen), opts);
  state_->axes = state_->c.separable ? 1 : state_->c.active_modes.size();
}

const DriftTableOptions& DriftTable::options() const noexcept { return state_->opts; }
double DriftTable::decay_slope() const noexcept { return state_->opts.decay_slope; }

std::size_t DriftTable::nodes() const {
  std::lock_guard lock(state_->mutex);
  return state_->cache.size();
}

Vec DriftTable::operator()(const Vec& x) const {
  const State& s = *state_;
  const auto& active = s.c.active_modes;
  const double step = s.opts.lattice_step;
  Vec out = Vec::Zero(static_cast<Eigen::Index>(s.c.modes));

  if (s.c.separable) {
    // Component n interpolates along the shared coordinate at x_n.
    for (std::size_t k : active) {
      const double pos = x[static_cast<Eigen::Index>(k)] / step;
      const double lo = std::floor(pos);
      const double w = pos - lo;
      const auto lo_key = static_cast<long>(lo);
      const double a = s.node({lo_key}).value[k];
      const double b = w > 0.0 ? s.node({lo_key + 1}).value[k] : a;
      out[static_cast<Eigen::Index>(k)] = (1.0 - w) * a + w * b;
    }
    return out;
  }

  const std::size_t axes = active.size();
  Key base(axes);
  std::vector<double> w(axes);
  for (std::size_t a = 0; a < axes; ++a) {
    const double pos = x[static_cast<Eigen::Index>(active[a])] / step;
    const double lo = std::floor(pos);
    base[a] = static_cast<long>(lo);
    w[a] = pos - lo;
  }
  for (std::size_t corner = 0; corner < (std::size_t{1} << axes); ++corner) {
    double weight = 1.0;
    Key key = base;
    for (std::size_t a = 0; a < axes; ++a) {
      const bool up = (corner >> a) & 1u;
      weight *= up ? w[a] : 1.0 - w[a];
      key[a] += up ? 1 : 0;
    }
    if (weight == 0.0) continue;
    out += weight * s.node(key).value.coeffs();
  }
  return out;
}

double DriftTable::max_stderr() const {
  std::lock_guard lock(state_->mutex);
  double worst = 0.0;
  for (const auto& [key, est] : state_->cache) worst = std::max(worst, est.stderr);
  return worst;
}

double DriftTable::quantization_error() const {
  std::lock_guard lock(state_->mutex);
  const auto& cache = state_->cache;
  double worst = 0.0;
  for (const auto& [key, est] : cache) {
    for (std::size_t a = 0; a < key.size(); ++a) {
      Key lo = key;
      Key hi = key;
      --lo[a];
      ++hi[a];
      const auto l = cache.find(lo);
      const auto h = cache.find(hi);
      if (l == cache.end() || h == cache.end()) continue;
      const Vec second = l->second.value.coeffs() - 2.0 * est.value.coeffs() + h->second.value.coeffs();
      worst = std::max(worst, second.cwiseAbs().maxCoeff() / 8.0);
    }
  }
  return worst;
}

}  // namespace roughavg
