#include <doctest.h>

#include <cmath>
#include <vector>

#include "lipest/data_train.hpp"

using namespace lipest;

namespace {

bool same_weights(const Mlp& a, const Mlp& b) {
  if (a.layers().size() != b.layers().size()) return false;
  for (std::size_t l = 0; l < a.layers().size(); ++l) {
    if (a.layers()[l].weights != b.layers()[l].weights) return false;
    if (a.layers()[l].bias != b.layers()[l].bias) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("data_train") {

TEST_CASE("gen_spheres: no spheres means all-positive targets") {
  const Box square = Box::centered_cube(2, 1.0);
  const Dataset data = gen_spheres(2, 0, 10000, square, 3);
  REQUIRE(data.inputs.size() == 10000);
  double mean = 0.0;
  for (const auto& y : data.targets) mean += y[0];
  mean /= static_cast<double>(data.targets.size());
  CHECK(std::abs(mean - 1.0) < 0.02);
  for (const auto& x : data.inputs) CHECK(square.contains(x));
}

TEST_CASE("gen_spheres: radius range and sphere labelling") {
  Eigen::VectorXd lo(2), hi(2);
  lo << -2.0, -1.0;
  hi << 2.0, 1.0;  // r_domain = half the shortest side = 1
  const Box domain(lo, hi);
  const Dataset data = gen_spheres(2, 3, 4000, domain, 11);
  REQUIRE(data.meta.radii.size() == 3);
  for (double r : data.meta.radii) {
    CHECK(r >= 0.1);
    CHECK(r <= 0.4);
  }
  for (std::size_t p = 0; p < data.inputs.size(); ++p) {
    bool inside = false;
    for (std::size_t s = 0; s < 3; ++s) {
      inside = inside || (data.inputs[p] - data.meta.centers[s]).norm() <=
                             data.meta.radii[s];
    }
    const double noise = data.targets[p][0] - (inside ? -1.0 : 1.0);
    CHECK(std::abs(noise) < 1.0);  // 10 sigma
  }
}

TEST_CASE("gen_spheres is deterministic") {
  const Box square = Box::centered_cube(3, 1.0);
  const Dataset a = gen_spheres(3, 2, 500, square, 42);
  const Dataset b = gen_spheres(3, 2, 500, square, 42);
  REQUIRE(a.inputs.size() == b.inputs.size());
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    CHECK(a.inputs[i] == b.inputs[i]);
    CHECK(a.targets[i] == b.targets[i]);
  }
  const Dataset c = gen_spheres(3, 2, 500, square, 43);
  CHECK(a.inputs[0] != c.inputs[0]);
}

TEST_CASE("mse loss on a perfect fit is zero") {
  const Mlp net = init_mlp({2, 4, 1}, 5);
  std::vector<Eigen::VectorXd> xs, ys;
  Rng rng(9);
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd x(2);
    x << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
    xs.push_back(x);
    ys.push_back(forward(net, x).output);
  }
  const auto [loss, grads] = mse_loss_and_grads(net, xs, ys);
  CHECK(loss == 0.0);
  for (const LayerGrads& g : grads) {
    CHECK(g.weights.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.bias.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("mse gradient of a scalar linear net is 2w") {
  for (double w : {0.3, -1.7, 2.0}) {
    const Mlp net({{Eigen::MatrixXd::Constant(1, 1, w),
                    Eigen::VectorXd::Zero(1), false}});
    std::vector<Eigen::VectorXd> xs{Eigen::VectorXd::Ones(1)};
    std::vector<Eigen::VectorXd> ys{Eigen::VectorXd::Zero(1)};
    const auto [loss, grads] = mse_loss_and_grads(net, xs, ys);
    CHECK(loss == doctest::Approx(w * w));
    CHECK(grads[0].weights(0, 0) == doctest::Approx(2.0 * w));
  }
}

TEST_CASE("training gradients match finite differences") {
  Rng rng(777);
  const Box square = Box::centered_cube(3, 1.0);
  const Dataset data = gen_spheres(3, 2, 16, square, 8);

  const Mlp net = init_mlp({3, 6, 4, 1}, 21);
  const auto [loss, grads] = mse_loss_and_grads(net, data.inputs, data.targets);

  int checked = 0;
  while (checked < 20) {
    const std::size_t l = rng.raw() % net.layers().size();
    const AffineLayer& layer = net.layers()[l];
    const auto r = static_cast<Eigen::Index>(rng.raw() % layer.out_dim());
    const auto c = static_cast<Eigen::Index>(rng.raw() % (layer.in_dim() + 1));
    const double h = 1e-6;

    auto perturbed = [&](double delta) {
      std::vector<AffineLayer> layers = net.layers();
      if (c < layer.in_dim()) {
        layers[l].weights(r, c) += delta;
      } else {
        layers[l].bias(r) += delta;
      }
      return mse_loss_and_grads(Mlp(std::move(layers)), data.inputs,
                                data.targets)
          .first;
    };
    const double fd = (perturbed(h) - perturbed(-h)) / (2.0 * h);
    const double analytic = c < layer.in_dim() ? grads[l].weights(r, c)
                                               : grads[l].bias(r);
    const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-4});
    CHECK(std::abs(fd - analytic) / scale <= 1e-4);
    ++checked;
  }
}

TEST_CASE("zero learning rate leaves the net untouched") {
  const Box square = Box::centered_cube(2, 1.0);
  const Dataset data = gen_spheres(2, 1, 50, square, 2);
  const Mlp net = init_mlp({2, 5, 1}, 4);
  TrainConfig config;
  config.learning_rate = 0.0;
  config.epochs = 3;
  const TrainResult result = train(net, data, config);
  CHECK(same_weights(net, result.net));
}

TEST_CASE("adam closes a small gap on a linear fit") {
  // Linear net on data from a nearby linear map: 500 epochs of Adam at the
  // default rate move weights by at most 0.25, so keep the optimum close.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Mlp net = init_mlp({1, 1}, seed);
    const double w0 = net.layers()[0].weights(0, 0);
    const double b0 = net.layers()[0].bias(0);

    Dataset data;
    Rng rng(seed + 1000);
    for (int i = 0; i < 64; ++i) {
      Eigen::VectorXd x(1), y(1);
      x[0] = rng.uniform(-1.0, 1.0);
      y[0] = (w0 + 0.1) * x[0] + (b0 - 0.08);
      data.inputs.push_back(x);
      data.targets.push_back(y);
    }

    TrainConfig config;
    config.epochs = 500;
    const TrainResult result = train(net, data, config);
    REQUIRE(result.loss_history.size() == 500);
    CHECK(result.loss_history.back() <= 1e-3 * result.loss_history.front());
  }
}

TEST_CASE("training is deterministic and the loss history finite") {
  const Box square = Box::centered_cube(2, 1.0);
  const Dataset data = gen_spheres(2, 3, 800, square, 12);
  TrainConfig config;
  config.epochs = 500;
  config.seed = 12;
  const Mlp initial = init_mlp({2, 16, 16, 1}, 12);
  const TrainResult a = train(initial, data, config);
  const TrainResult b = train(initial, data, config);
  CHECK(same_weights(a.net, b.net));
  for (double loss : a.loss_history) CHECK(std::isfinite(loss));
  CHECK(a.loss_history.back() < a.loss_history.front());
}

TEST_CASE("training reduces the loss on the running example") {
  const Box square = Box::centered_cube(2, 1.0);
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Dataset data = gen_spheres(2, 3, 800, square, seed);
    TrainConfig config;
    config.epochs = 500;
    config.seed = seed;
    const TrainResult result = train(init_mlp({2, 16, 16, 1}, seed), data, config);
    if (result.loss_history.back() < result.loss_history.front()) ++improved;
  }
  CHECK(improved >= 29);  // at least 95 percent of seeds
}

TEST_CASE("diverging loss is reported") {
  Dataset data;
  Eigen::VectorXd x(1), y(1);
  x[0] = 1.0;
  y[0] = 0.0;
  data.inputs.push_back(x);
  data.targets.push_back(y);
  TrainConfig config;
  config.learning_rate = 1e160;
  config.epochs = 5;
  CHECK_THROWS_AS(train(init_mlp({1, 1}, 0), data, config), DivergedLoss);
}

TEST_CASE("config invariants") {
  TrainConfig config;
  config.epochs = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.epochs = 1;
  config.learning_rate = -1.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

}  // TEST_SUITE
