#include "roughavg/lift.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <string>

#include "roughavg/error.hpp"

namespace roughavg {

LiftKind parse_lift_kind(std::string_view name) {
  if (name == "brownian_ito") return LiftKind::brownian_ito;
  if (name == "brownian_strat") return LiftKind::brownian_strat;
  if (name == "fbm") return LiftKind::fbm;
  if (name == "smooth") return LiftKind::smooth;
  fail(ErrorKind::configuration, "unknown driver kind '" + std::string(name) + "'");
}

const char* to_string(LiftKind kind) noexcept {
  switch (kind) {
    case LiftKind::brownian_ito: return "brownian_ito";
    case LiftKind::brownian_strat: return "brownian_strat";
    case LiftKind::fbm: return "fbm";
    case LiftKind::smooth: return "smooth";
  }
  return "unknown";
}

void LiftSpec::validate() const {
  require(fine_factor >= 1, ErrorKind::invalid_input, "fine_factor must be at least 1");
  require(gamma > 1.0 / 3.0 && gamma <= 0.5, ErrorKind::invalid_input, "gamma must lie in (1/3, 1/2]");
  if (kind == LiftKind::fbm) {
    require(hurst > 1.0 / 3.0 && hurst <= 0.5, ErrorKind::invalid_input, "hurst must lie in (1/3, 1/2]");
    require(gamma < hurst, ErrorKind::invalid_input, "fbm lifts need gamma < hurst");
  }
}

IntegrationRule rule_for(LiftKind kind) noexcept {
  return kind == LiftKind::brownian_ito ? IntegrationRule::left_point : IntegrationRule::trapezoid;
}

namespace {

// FFTW planning is not thread-safe; execution on new arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
    if (data == nullptr) fail(ErrorKind::invalid_input, "fftw allocation failed");
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* data;
};

double fgn_autocov(std::size_t k, double hurst) {
  const double h2 = 2.0 * hurst;
  const double kk = static_cast<double>(k);
  if (k == 0) return 1.0;
  return 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + std::pow(kk - 1.0, h2));
}

}  // namespace

// Davies-Harte: fGn on L uniform steps embedded in a circulant of size 2L.
struct FineSampler::Circulant {
  std::size_t steps = 0;
  std::size_t size = 0;
  std::vector<double> scale;  // sqrt(eigenvalue / size) * dt^H
  fftw_plan plan = nullptr;

  ~Circulant() {
    if (plan != nullptr) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

FineSampler::FineSampler(LiftSpec spec, TimeGrid grid, std::size_t dim, std::uint32_t stream_base)
    : spec_(spec), grid_(std::move(grid)), dim_(dim), stream_base_(stream_base) {
  spec_.validate();
  require(dim_ >= 1, ErrorKind::invalid_input, "driver dimension must be at least 1");
  require(grid_.steps() >= 1, ErrorKind::invalid_input, "driver grid needs at least one step");
  if (spec_.kind != LiftKind::fbm) return;

  require(grid_.is_uniform(), ErrorKind::invalid_input, "fbm sampling needs a uniform grid");
  const std::size_t steps = grid_.steps() * spec_.fine_factor;
  require(steps + 1 <= kMaxFbmFinePoints, ErrorKind::invalid_input,
          "fbm fine grid exceeds " + std::to_string(kMaxFbmFinePoints) + " points");

  auto circ = std::make_shared<Circulant>();
  circ->steps = steps;
  circ->size = 2 * steps;
  const std::size_t size = circ->size;
  FftwBuffer in(size);
  FftwBuffer out(size);
  {
    std::lock_guard lock(fftw_planner_mutex());
    circ->plan = fftw_plan_dft_1d(static_cast<int>(size), in.data, out.data, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  require(circ->plan != nullptr, ErrorKind::invalid_input, "fftw planning failed");

  for (std::size_t j = 0; j < size; ++j) {
    const std::size_t lag = j <= steps ? j : size - j;
    in.data[j][0] = fgn_autocov(lag, spec_.hurst);
    in.data[j][1] = 0.0;
  }
  fftw_execute_dft(circ->plan, in.data, out.data);

  double largest = 0.0;
  for (std::size_t j = 0; j < size; ++j) largest = std::max(largest, std::abs(out.data[j][0]));
  const double dt = grid_.step() / static_cast<double>(spec_.fine_factor);
  const double dt_scale = std::pow(dt, spec_.hurst);
  circ->scale.resize(size);
  for (std::size_t j = 0; j < size; ++j) {
    double ev = out.data[j][0];
    require(ev > -1e-10 * largest, ErrorKind::invalid_input, "fbm circulant embedding is not nonnegative");
    ev = std::max(ev, 0.0);
    circ->scale[j] = std::sqrt(ev / static_cast<double>(size)) * dt_scale;
  }
  circulant_ = std::move(circ);
}

FinePath FineSampler::draw(std::uint32_t sample) const {
  FinePath out;
  out.coarse = grid_;
  out.fine_factor = spec_.fine_factor;
  out.dim = dim_;
  const std::size_t steps = out.fine_steps();
  out.increments.assign(steps * dim_, 0.0);
  const CounterRng rng(spec_.seed);

  switch (spec_.kind) {
    case LiftKind::brownian_ito:
    case LiftKind::brownian_strat: {
      std::vector<double> z(steps);
      for (std::size_t c = 0; c < dim_; ++c) {
        rng.fill_normal(sample, stream_base_ + static_cast<std::uint32_t>(c), 0, z);
        for (std::size_t k = 0; k < steps; ++k) out.increments[k * dim_ + c] = std::sqrt(out.fine_dt(k)) * z[k];
      }
      break;
    }
    case LiftKind::fbm: {
      const Circulant& circ = *circulant_;
      FftwBuffer in(circ.size);
      FftwBuffer res(circ.size);
      // One complex transform yields two independent components.
      for (std::size_t pair = 0; 2 * pair < dim_; ++pair) {
        std::span<double> normals(&in.data[0][0], 2 * circ.size);
        rng.fill_normal(sample, stream_base_ + static_cast<std::uint32_t>(pair), 0, normals);
        for (std::size_t j = 0; j < circ.size; ++j) {
          in.data[j][0] *= circ.scale[j];
          in.data[j][1] *= circ.scale[j];
        }
        fftw_execute_dft(circ.plan, in.data, res.data);
        const std::size_t c0 = 2 * pair;
        for (std::size_t k = 0; k < steps; ++k) {
          out.increments[k * dim_ + c0] = res.data[k][0];
          if (c0 + 1 < dim_) out.increments[k * dim_ + c0 + 1] = res.data[k][1];
        }
      }
      break;
    }
    case LiftKind::smooth: {
      // Deterministic test path X^c_t = sin((c + 1) t).
      for (std::size_t k = 0; k < steps; ++k) {
        const std::size_t coarse = k / spec_.fine_factor;
        const double h = out.fine_dt(k);
        const double t0 = grid_[coarse] + static_cast<double>(k % spec_.fine_factor) * h;
        for (std::size_t c = 0; c < dim_; ++c) {
          const double w = static_cast<double>(c + 1);
          out.increments[k * dim_ + c] = std::sin(w * (t0 + h)) - std::sin(w * t0);
        }
      }
      break;
    }
  }
  return out;
}

RoughPath lift_fine(const FinePath& fine, IntegrationRule rule, double gamma) {
  const std::size_t n = fine.coarse.steps();
  const std::size_t dim = fine.dim;
  const std::size_t f = fine.fine_factor;
  require(fine.increments.size() == n * f * dim, ErrorKind::invalid_input, "fine path has the wrong size");
  const double weight = rule == IntegrationRule::trapezoid ? 0.5 : 0.0;

  std::vector<double> first((n + 1) * dim, 0.0);
  std::vector<double> blocks(n * dim * dim, 0.0);
  std::vector<double> anchored((n + 1) * dim * dim, 0.0);
  std::vector<double> local(dim, 0.0);   // delta X from the coarse left point
  std::vector<double> origin(dim, 0.0);  // delta X from t_0
  std::vector<double> area0(dim * dim, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    std::fill(local.begin(), local.end(), 0.0);
    double* blk = blocks.data() + i * dim * dim;
    for (std::size_t k = i * f; k < (i + 1) * f; ++k) {
      const double* dx = fine.step(k);
      for (std::size_t a = 0; a < dim; ++a) {
        const double la = local[a] + weight * dx[a];
        const double oa = origin[a] + weight * dx[a];
        for (std::size_t b = 0; b < dim; ++b) {
          blk[a * dim + b] += la * dx[b];
          area0[a * dim + b] += oa * dx[b];
        }
      }
      for (std::size_t a = 0; a < dim; ++a) {
        local[a] += dx[a];
        origin[a] += dx[a];
      }
    }
    std::copy(origin.begin(), origin.end(), first.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
    std::copy(area0.begin(), area0.end(), anchored.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim * dim));
  }
  return RoughPath(fine.coarse, dim, gamma, std::move(first), std::move(blocks), std::move(anchored));
}

RoughPath lift_brownian(const LiftSpec& spec, const TimeGrid& grid, std::size_t m, std::uint32_t sample) {
  require(spec.kind == LiftKind::brownian_ito || spec.kind == LiftKind::brownian_strat, ErrorKind::invalid_input,
          "lift_brownian needs a Brownian lift kind");
  require(m >= 1, ErrorKind::invalid_input, "Brownian dimension must be at least 1");
  const FineSampler sampler(spec, grid, m);
  return lift_fine(sampler.draw(sample), rule_for(spec.kind), spec.gamma);
}

RoughPath lift_fbm(const LiftSpec& spec, const TimeGrid& grid, std::size_t d, std::uint32_t sample) {
  require(spec.kind == LiftKind::fbm, ErrorKind::invalid_input, "lift_fbm needs the fbm lift kind");
  require(d >= 1, ErrorKind::invalid_input, "fbm dimension must be at least 1");
  const FineSampler sampler(spec, grid, d);
  return lift_fine(sampler.draw(sample), IntegrationRule::trapezoid, spec.gamma);
}

RoughPath lift_smooth(const TimeGrid& grid, std::size_t dim, double gamma,
                      const std::function<Eigen::VectorXd(double)>& value,
                      const std::function<Eigen::MatrixXd(double, double)>& area) {
  const std::size_t n = grid.steps();
  std::vector<double> first((n + 1) * dim);
  std::vector<double> blocks(n * dim * dim);
  std::vector<double> anchored((n + 1) * dim * dim, 0.0);
  const auto d = static_cast<Eigen::Index>(dim);
  for (std::size_t i = 0; i <= n; ++i) {
    const Eigen::VectorXd x = value(grid[i]);
    require(x.size() == d, ErrorKind::invalid_input, "smooth path value has the wrong dimension");
    Eigen::Map<Eigen::VectorXd>(first.data() + i * dim, d) = x;
    if (i > 0) {
      const Eigen::MatrixXd blk = area(grid[i - 1], grid[i]);
      const Eigen::MatrixXd anc = area(grid[0], grid[i]);
      require(blk.rows() == d && blk.cols() == d && anc.rows() == d && anc.cols() == d, ErrorKind::invalid_input,
              "smooth path area has the wrong shape");
      Eigen::Map<RowMatrix>(blocks.data() + (i - 1) * dim * dim, d, d) = blk;
      Eigen::Map<RowMatrix>(anchored.data() + i * dim * dim, d, d) = anc;
    }
  }
  return RoughPath(grid, dim, gamma, std::move(first), std::move(blocks), std::move(anchored));
}

namespace {

void check_fine_matches(const RoughPath& p, const FinePath& fine, const char* what) {
  require(fine.coarse == p.grid() && fine.dim == p.dim(), ErrorKind::invalid_input,
          std::string(what) + " fine data does not match its rough path");
  const std::size_t dim = p.dim();
  std::vector<double> run(dim, 0.0);
  for (std::size_t i = 0; i < p.steps(); ++i) {
    for (std::size_t k = i * fine.fine_factor; k < (i + 1) * fine.fine_factor; ++k)
      for (std::size_t a = 0; a < dim; ++a) run[a] += fine.step(k)[a];
    const auto inc = p.increment(0, i + 1);
    for (std::size_t a = 0; a < dim; ++a) {
      const auto ai = static_cast<Eigen::Index>(a);
      require(std::abs(run[a] - inc[ai]) <= 1e-9 * (1.0 + std::abs(inc[ai])), ErrorKind::invalid_input,
              std::string(what) + " fine increments do not sum to the coarse path");
    }
  }
}

}  // namespace

RoughPath join_mixed(const RoughPath& b, const RoughPath& w, const FinePath& b_fine, const FinePath& w_fine) {
  require(b.grid() == w.grid(), ErrorKind::invalid_input, "join_mixed needs a shared grid");
  require(b_fine.fine_factor == w_fine.fine_factor, ErrorKind::invalid_input, "join_mixed needs a shared fine subgrid");
  check_fine_matches(b, b_fine, "slow");
  check_fine_matches(w, w_fine, "fast");

  const std::size_t n = b.steps();
  const std::size_t d = b.dim();
  const std::size_t m = w.dim();
  const std::size_t dim = d + m;
  const std::size_t f = b_fine.fine_factor;
  const bool anchored = b.has_anchored() && w.has_anchored();

  std::vector<double> first((n + 1) * dim);
  for (std::size_t i = 0; i <= n; ++i) {
    std::copy_n(b.first_level_data().data() + i * d, d, first.data() + i * dim);
    std::copy_n(w.first_level_data().data() + i * m, m, first.data() + i * dim + d);
  }

  std::vector<double> blocks(n * dim * dim, 0.0);
  std::vector<double> anc;
  if (anchored) anc.assign((n + 1) * dim * dim, 0.0);
  std::vector<double> cross(d * m);   // I[B,W] over the current coarse step
  std::vector<double> cross0(d * m, 0.0);  // I[B,W] from t_0
  std::vector<double> local(d);
  std::vector<double> origin(d, 0.0);

  const auto put_cross = [&](double* out, const double* top_right, const Eigen::VectorXd& db,
                             const Eigen::VectorXd& dw) {
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t j = 0; j < m; ++j) {
        const auto ai = static_cast<Eigen::Index>(a);
        const auto ji = static_cast<Eigen::Index>(j);
        out[a * dim + d + j] = top_right[a * m + j];
        out[(d + j) * dim + a] = dw[ji] * db[ai] - top_right[a * m + j];
      }
  };
  const auto put_diag = [&](double* out, const Eigen::Ref<const RowMatrix>& bb, const Eigen::Ref<const RowMatrix>& ww) {
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t c = 0; c < d; ++c) out[a * dim + c] = bb(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t c = 0; c < m; ++c)
        out[(d + a) * dim + d + c] = ww(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
  };

  for (std::size_t i = 0; i < n; ++i) {
    std::fill(cross.begin(), cross.end(), 0.0);
    std::fill(local.begin(), local.end(), 0.0);
    for (std::size_t k = i * f; k < (i + 1) * f; ++k) {
      const double* db = b_fine.step(k);
      const double* dw = w_fine.step(k);
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t j = 0; j < m; ++j) {
          cross[a * m + j] += local[a] * dw[j];
          cross0[a * m + j] += origin[a] * dw[j];
        }
      for (std::size_t a = 0; a < d; ++a) {
        local[a] += db[a];
        origin[a] += db[a];
      }
    }
    double* blk = blocks.data() + i * dim * dim;
    put_diag(blk, b.block(i), w.block(i));
    put_cross(blk, cross.data(), b.increment(i, i + 1), w.increment(i, i + 1));
    if (anchored) {
      double* a0 = anc.data() + (i + 1) * dim * dim;
      put_diag(a0, b.anchored(i + 1), w.anchored(i + 1));
      put_cross(a0, cross0.data(), b.increment(0, i + 1), w.increment(0, i + 1));
    }
  }
  std::optional<std::vector<double>> anchored_level;
  if (anchored) anchored_level = std::move(anc);
  return RoughPath(b.grid(), dim, std::min(b.gamma(), w.gamma()), std::move(first), std::move(blocks),
                   std::move(anchored_level));
}

MixedSample sample_mixed(const FineSampler& slow, const FineSampler& fast, std::uint32_t sample) {
  require(fast.spec().kind == LiftKind::brownian_ito, ErrorKind::invalid_input, "the fast driver must be Ito Brownian");
  const FinePath bf = slow.draw(sample);
  const FinePath wf = fast.draw(sample);
  RoughPath b = lift_fine(bf, rule_for(slow.spec().kind), slow.spec().gamma);
  RoughPath w = lift_fine(wf, IntegrationRule::left_point, fast.spec().gamma);
  RoughPath xi = join_mixed(b, w, bf, wf);
  return {std::move(b), std::move(w), std::move(xi)};
}

}  // namespace roughavg
