#pragma once

#include <Eigen/Core>
#include <vector>

#include "lipest/errors.hpp"

namespace lipest {

// One affine map W x + b, optionally followed by a componentwise ReLU.
struct AffineLayer {
  Eigen::MatrixXd weights;  // out_dim x in_dim
  Eigen::VectorXd bias;     // out_dim
  bool relu_after = false;

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }
};

// Feed-forward ReLU network. Immutable after construction and safe to share
// across threads; the constructor enforces every shape/finiteness invariant,
// including that the final layer carries no ReLU.
class Mlp {
 public:
  explicit Mlp(std::vector<AffineLayer> layers);

  const std::vector<AffineLayer>& layers() const { return layers_; }
  Eigen::Index input_dim() const { return input_dim_; }
  Eigen::Index output_dim() const { return output_dim_; }
  // Total number of ReLU units, i.e. the activation-pattern length.
  Eigen::Index relu_units() const { return relu_units_; }

 private:
  std::vector<AffineLayer> layers_;
  Eigen::Index input_dim_ = 0;
  Eigen::Index output_dim_ = 0;
  Eigen::Index relu_units_ = 0;
};

// Everything one forward pass records: used to reuse preactivations for the
// Jacobian and by the breakpoint oracle.
struct EvalTape {
  Eigen::VectorXd input;
  std::vector<Eigen::VectorXd> preactivations;  // per ReLU layer, in order
  Eigen::VectorXd output;
  std::vector<bool> pattern;  // preactivation > 0, concatenated over ReLU layers
};

EvalTape forward(const Mlp& net, const Eigen::VectorXd& x);

// A generalized-Jacobian selection at tape.input: G = W_L D_{L-1} ... D_1 W_1
// with D_k the 0/1 ReLU pattern of layer k. The ReLU derivative at a
// preactivation of exactly 0 is 0. One reverse pass per output row.
Eigen::MatrixXd clarke_jacobian(const Mlp& net, const EvalTape& tape);

std::vector<bool> activation_pattern(const Mlp& net, const Eigen::VectorXd& x);

}  // namespace lipest
