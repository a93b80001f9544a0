#pragma once

#include <cstdint>
#include <vector>

#include "lipest/domain.hpp"
#include "lipest/net.hpp"

namespace lipest {

struct Dataset {
  std::vector<Eigen::VectorXd> inputs;
  std::vector<Eigen::VectorXd> targets;

  struct Meta {
    std::uint64_t seed = 0;
    std::vector<Eigen::VectorXd> centers;
    std::vector<double> radii;
    double noise_std = 0.1;
  } meta;
};

// Synthetic regression set: points uniform over the domain, target -1 inside
// any of the random hyperspheres and +1 elsewhere, plus N(0, 0.1^2) noise.
// Sphere radii are uniform in [0.1, 0.4] * r_domain with r_domain half the
// shortest domain side.
Dataset gen_spheres(Eigen::Index dim, int n_spheres, std::int64_t n_points,
                    const Box& domain, std::uint64_t seed);

struct TrainConfig {
  double learning_rate = 5e-4;
  std::int64_t epochs = 500;
  std::int64_t batch = 0;  // 0 = full batch
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct LayerGrads {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

// loss = mean over the batch of ||f(x) - y||_2^2; gradients by reverse mode
// with the same ReLU-at-0 = 0 selection as clarke_jacobian.
std::pair<double, std::vector<LayerGrads>> mse_loss_and_grads(
    const Mlp& net, const std::vector<Eigen::VectorXd>& inputs,
    const std::vector<Eigen::VectorXd>& targets);

// Fresh network for an architecture like [2, 16, 16, 1]: ReLU after every
// layer but the last, weights and biases uniform in +-1/sqrt(fan_in).
Mlp init_mlp(const std::vector<Eigen::Index>& arch, std::uint64_t seed);

struct TrainResult {
  Mlp net;
  std::vector<double> loss_history;  // one entry per epoch
};

TrainResult train(const Mlp& net, const Dataset& dataset,
                  const TrainConfig& config);

}  // namespace lipest
