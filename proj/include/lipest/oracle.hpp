#pragma once

#include <cstdint>
#include <vector>

#include "lipest/domain.hpp"
#include "lipest/net.hpp"
#include "lipest/norms.hpp"

namespace lipest {

struct GridSpec {
  std::int64_t points_per_dim = 2;
  bool include_midpoint_jitter = false;  // also evaluate cell centers
};

struct OracleResult {
  double value = 0.0;
  Eigen::VectorXd argmax;
};

// Max of sample_value over the regular lattice of points_per_dim^d points
// (box faces included), plus cell centers when jitter is enabled. Ties go to
// the lexicographically smallest point, which keeps the threaded reduction
// deterministic. Guard: points_per_dim^d <= 1e8.
OracleResult grid_oracle(const Mlp& net, const Box& domain,
                         const GridSpec& spec, const NormPair& pair,
                         int threads = 1);

// j-th of points_per_dim lattice coordinates along dimension `dim`, faces
// included. Heatmaps use the same formula so shared points match bit-exactly.
double lattice_coordinate(const Box& box, Eigen::Index dim, std::int64_t j,
                          std::int64_t points_per_dim);

// All inputs in (low, high) where some hidden preactivation crosses zero,
// sorted, deduplicated at 1e-12. Input dim must be 1.
std::vector<double> enumerate_breakpoints(const Mlp& net, const Box& interval);

// Exact local Lipschitz constant for 1-D input nets: the Jacobian is
// constant on every open segment between consecutive breakpoints, so the
// max over segment midpoints is the supremum.
OracleResult breakpoint_oracle_1d(const Mlp& net, const Box& interval,
                                  const NormPair& pair);

}  // namespace lipest
