#include "roughavg/rough_path.hpp"

#include <algorithm>
#include <cmath>

#include "roughavg/error.hpp"
#include "roughavg/pairs.hpp"
#include "roughavg/rng.hpp"

namespace roughavg {

RoughPath::RoughPath(TimeGrid grid, std::size_t dim, double gamma, std::vector<double> first_level,
                     std::vector<double> second_level, std::optional<std::vector<double>> anchored)
    : grid_(std::move(grid)),
      dim_(dim),
      gamma_(gamma),
      first_(std::move(first_level)),
      blocks_(std::move(second_level)),
      anchored_(std::move(anchored)) {
  require(dim_ >= 1, ErrorKind::invalid_input, "rough path dimension must be at least 1");
  require(gamma_ > 1.0 / 3.0 && gamma_ <= 0.5, ErrorKind::invalid_input,
          "rough path gamma must lie in (1/3, 1/2]");
  const std::size_t n = grid_.steps();
  require(first_.size() == (n + 1) * dim_, ErrorKind::invalid_input, "first level has the wrong size");
  require(blocks_.size() == n * dim_ * dim_, ErrorKind::invalid_input, "second level has the wrong size");
  require(std::all_of(first_.begin(), first_.end(), [](double v) { return std::isfinite(v); }),
          ErrorKind::invalid_input, "first level has non-finite entries");
  if (anchored_) {
    require(anchored_->size() == (n + 1) * dim_ * dim_, ErrorKind::invalid_input,
            "anchored second level has the wrong size");
  }
}

Eigen::Map<const Eigen::VectorXd> RoughPath::value(std::size_t i) const {
  return {first_.data() + i * dim_, static_cast<Eigen::Index>(dim_)};
}

Eigen::VectorXd RoughPath::increment(std::size_t i, std::size_t j) const { return value(j) - value(i); }

Eigen::Map<const RowMatrix> RoughPath::block(std::size_t i) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  return {blocks_.data() + i * dim_ * dim_, d, d};
}

Eigen::Map<const RowMatrix> RoughPath::anchored(std::size_t i) const {
  require(anchored_.has_value(), ErrorKind::invalid_input, "rough path has no anchored second level");
  const auto d = static_cast<Eigen::Index>(dim_);
  return {anchored_->data() + i * dim_ * dim_, d, d};
}

RoughPath RoughPath::with_block(std::size_t i, const Eigen::Ref<const RowMatrix>& block) const {
  require(i < steps(), ErrorKind::invalid_index, "block index out of range");
  require(block.rows() == static_cast<Eigen::Index>(dim_) && block.cols() == static_cast<Eigen::Index>(dim_),
          ErrorKind::invalid_input, "replacement block has the wrong shape");
  std::vector<double> blocks = blocks_;
  Eigen::Map<RowMatrix>(blocks.data() + i * dim_ * dim_, block.rows(), block.cols()) = block;
  return RoughPath(grid_, dim_, gamma_, first_, std::move(blocks), anchored_);
}

RoughPath RoughPath::without_anchored() const { return RoughPath(grid_, dim_, gamma_, first_, blocks_); }

RowMatrix reconstruct_second_level(const RoughPath& p, std::size_t i, std::size_t j) {
  require(i < j, ErrorKind::invalid_index, "second level needs i < j");
  require(j <= p.steps(), ErrorKind::invalid_index, "second level index out of range");
  RowMatrix out = p.block(i);
  for (std::size_t k = i + 1; k < j; ++k) {
    out += p.block(k);
    out.noalias() += p.increment(i, k) * p.increment(k, k + 1).transpose();
  }
  return out;
}

std::vector<RowMatrix> prefix_second_level(const RoughPath& p) {
  const auto d = static_cast<Eigen::Index>(p.dim());
  std::vector<RowMatrix> out(p.steps() + 1);
  out[0] = RowMatrix::Zero(d, d);
  for (std::size_t k = 0; k < p.steps(); ++k) {
    out[k + 1] = out[k] + p.block(k);
    out[k + 1].noalias() += p.increment(0, k) * p.increment(k, k + 1).transpose();
  }
  return out;
}

namespace {

constexpr std::size_t kRandomTriples = 2000;
constexpr std::uint64_t kTripleSeed = 0xc4e2'0000'0000'0003ull;

double triple_defect(const RoughPath& p, std::size_t s, std::size_t u, std::size_t t) {
  const RowMatrix whole = reconstruct_second_level(p, s, t);
  RowMatrix split = reconstruct_second_level(p, s, u) + reconstruct_second_level(p, u, t);
  split.noalias() += p.increment(s, u) * p.increment(u, t).transpose();
  return (whole - split).norm();
}

}  // namespace

double chen_residual(const RoughPath& p) {
  const std::size_t n = p.steps();
  double worst = 0.0;
  if (n >= 2) {
    if (n <= 24) {
      for (std::size_t s = 0; s < n; ++s)
        for (std::size_t u = s + 1; u < n; ++u)
          for (std::size_t t = u + 1; t <= n; ++t) worst = std::max(worst, triple_defect(p, s, u, t));
    } else {
      const CounterRng rng(kTripleSeed);
      for (std::uint64_t k = 0; k < kRandomTriples; ++k) {
        const auto b = rng.block(k, static_cast<std::uint32_t>(n), kStreamPairs);
        std::size_t idx[3] = {b[0] % (n + 1), b[1] % (n + 1), b[2] % (n + 1)};
        std::sort(idx, idx + 3);
        if (idx[0] == idx[1] || idx[1] == idx[2]) continue;
        worst = std::max(worst, triple_defect(p, idx[0], idx[1], idx[2]));
      }
    }
  }
  if (p.has_anchored()) {
    // Triples (t_0, s, t): anchored(t) = R(s, t) + anchored(s) + dX_{s,0} dX_{t,s}^T.
    const auto d = static_cast<Eigen::Index>(p.dim());
    worst = std::max(worst, p.anchored(0).norm());
    RowMatrix running(d, d);
    for (std::size_t s = 0; s < n; ++s) {
      const Eigen::VectorXd from_origin = p.increment(0, s);
      running = p.block(s);
      for (std::size_t t = s + 1; t <= n; ++t) {
        if (t > s + 1) {
          running += p.block(t - 1);
          running.noalias() += p.increment(s, t - 1) * p.increment(t - 1, t).transpose();
        }
        RowMatrix defect = p.anchored(t) - running - p.anchored(s);
        defect.noalias() -= from_origin * p.increment(s, t).transpose();
        worst = std::max(worst, defect.norm());
      }
    }
  }
  return worst;
}

HolderStats holder_stats(const RoughPath& p, double gamma) {
  require(gamma > 0.0 && gamma <= 0.5, ErrorKind::invalid_input, "holder gamma must lie in (0, 1/2]");
  const auto prefix = prefix_second_level(p);
  const PairSet& set = holder_pairs(p.steps());
  const auto& grid = p.grid();
  HolderStats out;
  out.exhaustive = set.exhaustive;
  for (const auto [i, j] : set.pairs) {
    const double gap = grid[j] - grid[i];
    const Eigen::VectorXd dx = p.increment(i, j);
    RowMatrix area = prefix[j] - prefix[i];
    area.noalias() -= p.increment(0, i) * dx.transpose();
    out.path = std::max(out.path, dx.norm() / std::pow(gap, gamma));
    out.area = std::max(out.area, area.norm() / std::pow(gap, 2.0 * gamma));
  }
  out.homogeneous = out.path + std::sqrt(out.area);
  out.distance = out.path + out.area;
  return out;
}

double rough_distance(const RoughPath& a, const RoughPath& b, double gamma) {
  require(a.grid() == b.grid() && a.dim() == b.dim(), ErrorKind::invalid_input,
          "rough distance needs paths on the same grid and dimension");
  require(gamma > 0.0 && gamma <= 0.5, ErrorKind::invalid_input, "holder gamma must lie in (0, 1/2]");
  const auto pa = prefix_second_level(a);
  const auto pb = prefix_second_level(b);
  const PairSet& set = holder_pairs(a.steps());
  const auto& grid = a.grid();
  double first = 0.0;
  double second = 0.0;
  for (const auto [i, j] : set.pairs) {
    const double gap = grid[j] - grid[i];
    const Eigen::VectorXd da = a.increment(i, j);
    const Eigen::VectorXd db = b.increment(i, j);
    RowMatrix diff = (pa[j] - pa[i]) - (pb[j] - pb[i]);
    diff.noalias() -= a.increment(0, i) * da.transpose();
    diff.noalias() += b.increment(0, i) * db.transpose();
    first = std::max(first, (da - db).norm() / std::pow(gap, gamma));
    second = std::max(second, diff.norm() / std::pow(gap, 2.0 * gamma));
  }
  return first + second;
}

}  // namespace roughavg
