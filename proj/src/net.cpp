#include "lipest/net.hpp"

#include <string>

namespace lipest {

Mlp::Mlp(std::vector<AffineLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw InvalidModel("network needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const AffineLayer& layer = layers_[i];
    const std::string where = "layers[" + std::to_string(i) + "]";
    if (layer.weights.size() == 0) {
      throw InvalidModel(where + ".weights: empty matrix");
    }
    if (!layer.weights.allFinite()) {
      throw InvalidModel(where + ".weights: NaN or Inf entry");
    }
    if (!layer.bias.allFinite()) {
      throw InvalidModel(where + ".bias: NaN or Inf entry");
    }
    if (layer.bias.size() != layer.out_dim()) {
      throw InvalidModel(where + ".bias: length " +
                         std::to_string(layer.bias.size()) +
                         " does not match weight rows " +
                         std::to_string(layer.out_dim()));
    }
    if (i > 0 && layer.in_dim() != layers_[i - 1].out_dim()) {
      throw InvalidModel(where + ".weights: input dim " +
                         std::to_string(layer.in_dim()) +
                         " does not match previous layer output dim " +
                         std::to_string(layers_[i - 1].out_dim()));
    }
    if (layer.relu_after) relu_units_ += layer.out_dim();
  }
  if (layers_.back().relu_after) {
    throw InvalidModel("final layer must not have relu_after");
  }
  input_dim_ = layers_.front().in_dim();
  output_dim_ = layers_.back().out_dim();
}

EvalTape forward(const Mlp& net, const Eigen::VectorXd& x) {
  if (x.size() != net.input_dim()) {
    throw DimensionMismatch("input length " + std::to_string(x.size()) +
                            " does not match network input dim " +
                            std::to_string(net.input_dim()));
  }
  if (!x.allFinite()) throw NonFiniteInput("input has NaN or Inf entry");

  EvalTape tape;
  tape.input = x;
  tape.pattern.reserve(static_cast<std::size_t>(net.relu_units()));

  Eigen::VectorXd h = x;
  for (const AffineLayer& layer : net.layers()) {
    Eigen::VectorXd z = layer.weights * h + layer.bias;
    if (layer.relu_after) {
      for (Eigen::Index j = 0; j < z.size(); ++j) {
        tape.pattern.push_back(z[j] > 0.0);
      }
      tape.preactivations.push_back(z);
      h = z.cwiseMax(0.0);
    } else {
      h = std::move(z);
    }
  }
  tape.output = std::move(h);
  return tape;
}

Eigen::MatrixXd clarke_jacobian(const Mlp& net, const EvalTape& tape) {
  const auto& layers = net.layers();
  Eigen::MatrixXd jac(net.output_dim(), net.input_dim());

  for (Eigen::Index row = 0; row < net.output_dim(); ++row) {
    // Reverse pass for output row: start from the last layer's row, then
    // alternate pattern mask and weight product back to the input.
    Eigen::RowVectorXd u = layers.back().weights.row(row);
    std::size_t relu_index = tape.preactivations.size();
    for (std::size_t l = layers.size() - 1; l-- > 0;) {
      const AffineLayer& layer = layers[l];
      if (layer.relu_after) {
        const Eigen::VectorXd& z = tape.preactivations[--relu_index];
        for (Eigen::Index j = 0; j < u.size(); ++j) {
          if (!(z[j] > 0.0)) u[j] = 0.0;
        }
      }
      u = u * layer.weights;
    }
    jac.row(row) = u;
  }
  return jac;
}

std::vector<bool> activation_pattern(const Mlp& net, const Eigen::VectorXd& x) {
  return forward(net, x).pattern;
}

}  // namespace lipest
