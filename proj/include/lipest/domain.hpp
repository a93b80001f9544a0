#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "lipest/errors.hpp"
#include "lipest/rng.hpp"

namespace lipest {

// Axis-aligned box with strictly nonempty interior.
struct Box {
  Eigen::VectorXd low;
  Eigen::VectorXd high;

  Box() = default;
  Box(Eigen::VectorXd lo, Eigen::VectorXd hi);  // validates bounds

  Eigen::Index dim() const { return low.size(); }
  double volume() const;
  double side(Eigen::Index i) const { return high[i] - low[i]; }
  bool contains(const Eigen::VectorXd& x) const;

  static Box centered_cube(Eigen::Index dim, double half_side);
};

// Regular grid of k^d congruent boxes tiling `box`, ordered lexicographically
// by grid index (dimension 0 most significant). Guard: k^d <= 2^24.
std::vector<Box> init_subregions(const Box& box, std::int64_t k);

// Split at the midpoint of the longest side; ties go to the lowest dimension.
std::pair<Box, Box> subdivide(const Box& box);

// One point, each coordinate independently uniform over the box side.
Eigen::VectorXd sample_uniform(const Box& box, Rng& rng);

// Running maximum and Welford moments for one subregion.
struct RegionStats {
  std::int64_t n = 0;
  double max = -std::numeric_limits<double>::infinity();  // sentinel while n=0
  double mean = 0.0;
  double m2 = 0.0;
  Eigen::VectorXd argmax;

  double variance() const { return n >= 2 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stddev() const;
};

void update_stats(RegionStats& stats, double value, const Eigen::VectorXd& x);

}  // namespace lipest
