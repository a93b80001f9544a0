#include "lipest/domain.hpp"

#include <cmath>
#include <string>

namespace lipest {

Box::Box(Eigen::VectorXd lo, Eigen::VectorXd hi)
    : low(std::move(lo)), high(std::move(hi)) {
  if (low.size() != high.size()) {
    throw DimensionMismatch("box bounds have different lengths");
  }
  if (low.size() == 0) throw DimensionMismatch("box must have dimension >= 1");
  if (!low.allFinite() || !high.allFinite()) {
    throw NonFiniteInput("box bounds must be finite");
  }
  for (Eigen::Index i = 0; i < low.size(); ++i) {
    if (!(low[i] < high[i])) {
      throw DimensionMismatch("box side " + std::to_string(i) +
                              " is empty: low >= high");
    }
  }
}

double Box::volume() const {
  double v = 1.0;
  for (Eigen::Index i = 0; i < dim(); ++i) v *= side(i);
  return v;
}

bool Box::contains(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (x[i] < low[i] || x[i] > high[i]) return false;
  }
  return true;
}

Box Box::centered_cube(Eigen::Index dim, double half_side) {
  return Box(Eigen::VectorXd::Constant(dim, -half_side),
             Eigen::VectorXd::Constant(dim, half_side));
}

std::vector<Box> init_subregions(const Box& box, std::int64_t k) {
  if (k < 1) throw ConfigError("divisions per dimension must be >= 1");
  const Eigen::Index d = box.dim();

  constexpr std::int64_t kMaxCells = std::int64_t{1} << 24;
  std::int64_t cells = 1;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (cells > kMaxCells / k) {
      throw PartitionTooLarge("partition would exceed 2^24 subregions (K=" +
                              std::to_string(k) + ", d=" + std::to_string(d) +
                              ")");
    }
    cells *= k;
  }

  std::vector<Box> out;
  out.reserve(static_cast<std::size_t>(cells));
  std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    Eigen::VectorXd lo(d), hi(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double step = box.side(i) / static_cast<double>(k);
      const std::int64_t j = idx[static_cast<std::size_t>(i)];
      lo[i] = box.low[i] + static_cast<double>(j) * step;
      hi[i] = j == k - 1 ? box.high[i]
                         : box.low[i] + static_cast<double>(j + 1) * step;
    }
    out.emplace_back(std::move(lo), std::move(hi));
    // Odometer increment, last dimension fastest.
    for (Eigen::Index i = d - 1; i >= 0; --i) {
      if (++idx[static_cast<std::size_t>(i)] < k) break;
      idx[static_cast<std::size_t>(i)] = 0;
    }
  }
  return out;
}

std::pair<Box, Box> subdivide(const Box& box) {
  Eigen::Index split_dim = 0;
  double longest = box.side(0);
  for (Eigen::Index i = 1; i < box.dim(); ++i) {
    if (box.side(i) > longest) {
      longest = box.side(i);
      split_dim = i;
    }
  }
  const double mid = 0.5 * (box.low[split_dim] + box.high[split_dim]);

  Eigen::VectorXd left_high = box.high;
  left_high[split_dim] = mid;
  Eigen::VectorXd right_low = box.low;
  right_low[split_dim] = mid;
  return {Box(box.low, std::move(left_high)),
          Box(std::move(right_low), box.high)};
}

Eigen::VectorXd sample_uniform(const Box& box, Rng& rng) {
  Eigen::VectorXd x(box.dim());
  for (Eigen::Index i = 0; i < box.dim(); ++i) {
    x[i] = rng.uniform(box.low[i], box.high[i]);
  }
  return x;
}

double RegionStats::stddev() const { return std::sqrt(variance()); }

void update_stats(RegionStats& stats, double value, const Eigen::VectorXd& x) {
  if (!std::isfinite(value)) {
    throw NonFiniteValue("statistics update with non-finite value");
  }
  stats.n += 1;
  const double delta = value - stats.mean;
  stats.mean += delta / static_cast<double>(stats.n);
  stats.m2 += delta * (value - stats.mean);
  if (value > stats.max) {
    stats.max = value;
    stats.argmax = x;
  }
}

}  // namespace lipest
