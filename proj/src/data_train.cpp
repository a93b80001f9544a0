#include "lipest/data_train.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lipest {

Dataset gen_spheres(Eigen::Index dim, int n_spheres, std::int64_t n_points,
                    const Box& domain, std::uint64_t seed) {
  if (n_spheres < 0) throw ConfigError("sphere count must be >= 0");
  if (n_points < 1) throw ConfigError("point count must be >= 1");
  if (domain.dim() != dim) {
    throw DimensionMismatch("domain dimension does not match requested dim");
  }

  Rng rng(seed);
  double r_domain = domain.side(0);
  for (Eigen::Index i = 1; i < dim; ++i) r_domain = std::min(r_domain, domain.side(i));
  r_domain *= 0.5;

  Dataset data;
  data.meta.seed = seed;
  for (int s = 0; s < n_spheres; ++s) {
    data.meta.centers.push_back(sample_uniform(domain, rng));
    data.meta.radii.push_back(rng.uniform(0.1 * r_domain, 0.4 * r_domain));
  }

  data.inputs.reserve(static_cast<std::size_t>(n_points));
  data.targets.reserve(static_cast<std::size_t>(n_points));
  for (std::int64_t p = 0; p < n_points; ++p) {
    Eigen::VectorXd x = sample_uniform(domain, rng);
    bool inside = false;
    for (int s = 0; s < n_spheres && !inside; ++s) {
      inside = (x - data.meta.centers[static_cast<std::size_t>(s)]).norm() <=
               data.meta.radii[static_cast<std::size_t>(s)];
    }
    Eigen::VectorXd y(1);
    y[0] = (inside ? -1.0 : 1.0) + rng.normal(0.0, data.meta.noise_std);
    data.inputs.push_back(std::move(x));
    data.targets.push_back(std::move(y));
  }
  return data;
}

void TrainConfig::validate() const {
  if (learning_rate < 0.0) throw ConfigError("learning rate must be >= 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch < 0) throw ConfigError("batch size must be >= 0");
}

namespace {

// Forward + reverse over a whole batch as column-stacked matrices. Also used
// by train(), where the weights between Adam steps are not necessarily a
// valid Mlp.
std::pair<double, std::vector<LayerGrads>> loss_and_grads(
    const std::vector<AffineLayer>& layers, const Eigen::MatrixXd& inputs,
    const Eigen::MatrixXd& targets) {
  const std::size_t n_layers = layers.size();
  const double batch_size = static_cast<double>(inputs.cols());

  std::vector<Eigen::MatrixXd> activations(n_layers + 1);  // layer inputs
  std::vector<Eigen::MatrixXd> preacts(n_layers);
  activations[0] = inputs;
  for (std::size_t l = 0; l < n_layers; ++l) {
    preacts[l] =
        (layers[l].weights * activations[l]).colwise() + layers[l].bias;
    activations[l + 1] =
        layers[l].relu_after ? preacts[l].cwiseMax(0.0) : preacts[l];
  }

  const Eigen::MatrixXd residual = activations[n_layers] - targets;
  const double loss = residual.squaredNorm() / batch_size;

  std::vector<LayerGrads> grads(n_layers);
  Eigen::MatrixXd delta = 2.0 / batch_size * residual;  // dL/d preact
  for (std::size_t l = n_layers; l-- > 0;) {
    if (layers[l].relu_after) {
      delta = (preacts[l].array() > 0.0).select(delta, 0.0);
    }
    grads[l].weights.noalias() = delta * activations[l].transpose();
    grads[l].bias = delta.rowwise().sum();
    if (l > 0) delta = layers[l].weights.transpose() * delta;
  }
  return {loss, std::move(grads)};
}

Eigen::MatrixXd stack_columns(const std::vector<Eigen::VectorXd>& columns,
                              const char* what) {
  Eigen::MatrixXd out(columns[0].size(),
                      static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].size() != out.rows()) {
      throw DimensionMismatch(std::string(what) + " have inconsistent lengths");
    }
    out.col(static_cast<Eigen::Index>(i)) = columns[i];
  }
  return out;
}

}  // namespace

std::pair<double, std::vector<LayerGrads>> mse_loss_and_grads(
    const Mlp& net, const std::vector<Eigen::VectorXd>& inputs,
    const std::vector<Eigen::VectorXd>& targets) {
  if (inputs.empty()) throw ConfigError("batch must be nonempty");
  if (inputs.size() != targets.size()) {
    throw DimensionMismatch("batch inputs and targets differ in length");
  }
  const Eigen::MatrixXd x = stack_columns(inputs, "batch inputs");
  const Eigen::MatrixXd y = stack_columns(targets, "batch targets");
  if (x.rows() != net.input_dim() || y.rows() != net.output_dim()) {
    throw DimensionMismatch("batch dims do not match the network");
  }
  return loss_and_grads(net.layers(), x, y);
}

Mlp init_mlp(const std::vector<Eigen::Index>& arch, std::uint64_t seed) {
  if (arch.size() < 2) throw ConfigError("architecture needs >= 2 dims");
  for (Eigen::Index d : arch) {
    if (d < 1) throw ConfigError("architecture dims must be >= 1");
  }
  Rng rng(seed);
  std::vector<AffineLayer> layers;
  layers.reserve(arch.size() - 1);
  for (std::size_t l = 0; l + 1 < arch.size(); ++l) {
    const Eigen::Index fan_in = arch[l];
    const Eigen::Index fan_out = arch[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    AffineLayer layer;
    layer.weights.resize(fan_out, fan_in);
    for (Eigen::Index i = 0; i < fan_out; ++i) {
      for (Eigen::Index j = 0; j < fan_in; ++j) {
        layer.weights(i, j) = rng.uniform(-bound, bound);
      }
    }
    layer.bias.resize(fan_out);
    for (Eigen::Index i = 0; i < fan_out; ++i) {
      layer.bias[i] = rng.uniform(-bound, bound);
    }
    layer.relu_after = l + 2 < arch.size();
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

TrainResult train(const Mlp& net, const Dataset& dataset,
                  const TrainConfig& config) {
  config.validate();
  if (dataset.inputs.empty()) throw ConfigError("dataset is empty");
  if (dataset.inputs.size() != dataset.targets.size()) {
    throw DimensionMismatch("dataset inputs and targets differ in length");
  }

  std::vector<AffineLayer> layers = net.layers();
  const std::size_t n_layers = layers.size();
  const std::int64_t n_points = static_cast<std::int64_t>(dataset.inputs.size());
  const std::int64_t batch =
      config.batch <= 0 ? n_points : std::min(config.batch, n_points);

  struct AdamState {
    Eigen::MatrixXd mw, vw;
    Eigen::VectorXd mb, vb;
  };
  std::vector<AdamState> state(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    state[l].mw = Eigen::MatrixXd::Zero(layers[l].out_dim(), layers[l].in_dim());
    state[l].vw = state[l].mw;
    state[l].mb = Eigen::VectorXd::Zero(layers[l].out_dim());
    state[l].vb = state[l].mb;
  }

  const Eigen::MatrixXd all_x = stack_columns(dataset.inputs, "dataset inputs");
  const Eigen::MatrixXd all_y = stack_columns(dataset.targets, "dataset targets");
  if (all_x.rows() != layers.front().in_dim() ||
      all_y.rows() != layers.back().out_dim()) {
    throw DimensionMismatch("dataset dims do not match the network");
  }

  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(config.epochs));
  std::int64_t step = 0;

  for (std::int64_t epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_loss = 0.0;

    for (std::int64_t begin = 0; begin < n_points; begin += batch) {
      const std::int64_t count = std::min(batch, n_points - begin);
      auto [loss, grads] = loss_and_grads(layers, all_x.middleCols(begin, count),
                                          all_y.middleCols(begin, count));
      if (!std::isfinite(loss)) {
        throw DivergedLoss("training loss became non-finite at epoch " +
                           std::to_string(epoch));
      }
      epoch_loss += loss * static_cast<double>(count);

      ++step;
      const double bc1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(step));
      for (std::size_t l = 0; l < n_layers; ++l) {
        AdamState& s = state[l];
        s.mw = config.adam_beta1 * s.mw + (1.0 - config.adam_beta1) * grads[l].weights;
        s.vw = config.adam_beta2 * s.vw +
               (1.0 - config.adam_beta2) * grads[l].weights.cwiseProduct(grads[l].weights);
        s.mb = config.adam_beta1 * s.mb + (1.0 - config.adam_beta1) * grads[l].bias;
        s.vb = config.adam_beta2 * s.vb +
               (1.0 - config.adam_beta2) * grads[l].bias.cwiseProduct(grads[l].bias);

        layers[l].weights -=
            config.learning_rate *
            ((s.mw / bc1).array() / ((s.vw / bc2).array().sqrt() + config.adam_eps))
                .matrix();
        layers[l].bias -=
            config.learning_rate *
            ((s.mb / bc1).array() / ((s.vb / bc2).array().sqrt() + config.adam_eps))
                .matrix();
      }
    }
    history.push_back(epoch_loss / static_cast<double>(n_points));
  }

  return {Mlp(std::move(layers)), std::move(history)};
}

}  // namespace lipest
