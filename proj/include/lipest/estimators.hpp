#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lipest/domain.hpp"
#include "lipest/net.hpp"
#include "lipest/norms.hpp"

namespace lipest {

enum class Algorithm { Uniform, Partitioned, Ucb };
enum class SigmaMode { Stddev, Variance };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);
std::string to_string(SigmaMode m);
SigmaMode parse_sigma_mode(const std::string& s);

struct EstimatorConfig {
  std::int64_t samples = 1;  // total budget N
  NormPair pair;
  Algorithm algorithm = Algorithm::Uniform;
  std::int64_t k_divisions = 2;  // PARTITIONED: divisions per dimension
  double c = 10.0;               // UCB exploration constant
  double t_m = 2.0;              // subdivision time multiplier
  std::int64_t n0 = 10;          // UCB bootstrap threshold
  std::uint64_t seed = 0;
  SigmaMode sigma_mode = SigmaMode::Stddev;
  int threads = 1;  // worker cap; never affects results

  void validate() const;  // throws ConfigError
};

struct RegionReport {
  Box box;
  RegionStats stats;
};

struct EstimateReport {
  double estimate = 0.0;  // the lower bound r
  Eigen::VectorXd argmax_x;
  std::int64_t samples_used = 0;
  double wall_time_s = 0.0;  // sampling loop only
  std::vector<RegionReport> regions;
  std::vector<std::pair<std::int64_t, double>> trace;  // (sample index, running r)
};

// ||J_f(x)||_{alpha,beta} for the backprop selection of the generalized
// Jacobian at x.
double sample_value(const Mlp& net, const NormPair& pair,
                    const Eigen::VectorXd& x);

EstimateReport estimate_uniform(const Mlp& net, const Box& domain,
                                const EstimatorConfig& config);
EstimateReport estimate_partitioned(const Mlp& net, const Box& domain,
                                    const EstimatorConfig& config);
EstimateReport estimate_ucb(const Mlp& net, const Box& domain,
                            const EstimatorConfig& config);

// Dispatch on config.algorithm.
EstimateReport run_estimate(const Mlp& net, const Box& domain,
                            const EstimatorConfig& config);

// +inf while stats.n <= n0, otherwise s_max + c * sqrt(ln(t+1)/s_n) * s_sigma.
double ucb_score(const RegionStats& stats, std::int64_t t,
                 const EstimatorConfig& config);

}  // namespace lipest
