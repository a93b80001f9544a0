#include <doctest.h>

#include <cmath>
#include <vector>

#include "lipest/data_train.hpp"
#include "lipest/net.hpp"
#include "lipest/rng.hpp"

using namespace lipest;

namespace {

Mlp scalar_net(double w, bool relu, double w2) {
  // w2 * relu(w * x): two layers on scalar input.
  AffineLayer first{Eigen::MatrixXd::Constant(1, 1, w),
                    Eigen::VectorXd::Zero(1), relu};
  AffineLayer second{Eigen::MatrixXd::Constant(1, 1, w2),
                     Eigen::VectorXd::Zero(1), false};
  return Mlp({first, second});
}

// relu(x) + relu(-x) = |x|
Mlp abs_net() {
  Eigen::MatrixXd w1(2, 1);
  w1 << 1.0, -1.0;
  Eigen::MatrixXd w2(1, 2);
  w2 << 1.0, 1.0;
  return Mlp({{w1, Eigen::VectorXd::Zero(2), true},
              {w2, Eigen::VectorXd::Zero(1), false}});
}

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v[0] = x;
  return v;
}

// Central finite differences, the independent oracle for the reverse pass.
Eigen::MatrixXd fd_jacobian(const Mlp& net, const Eigen::VectorXd& x,
                            double h) {
  Eigen::MatrixXd jac(net.output_dim(), net.input_dim());
  for (Eigen::Index i = 0; i < net.input_dim(); ++i) {
    Eigen::VectorXd hi = x, lo = x;
    hi[i] += h;
    lo[i] -= h;
    jac.col(i) = (forward(net, hi).output - forward(net, lo).output) / (2.0 * h);
  }
  return jac;
}

bool away_from_kinks(const EvalTape& tape, double margin) {
  for (const Eigen::VectorXd& z : tape.preactivations) {
    if (z.cwiseAbs().minCoeff() < margin) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("net") {

TEST_CASE("forward basics") {
  const Mlp linear({{Eigen::MatrixXd::Constant(1, 1, 2.0),
                     Eigen::VectorXd::Zero(1), false}});
  CHECK(forward(linear, vec1(3.0)).output[0] == 6.0);

  const Mlp clamp = scalar_net(1.0, true, 1.0);
  const EvalTape tape = forward(clamp, vec1(-1.0));
  CHECK(tape.output[0] == 0.0);
  REQUIRE(tape.pattern.size() == 1);
  CHECK(tape.pattern[0] == false);

  CHECK(forward(abs_net(), vec1(5.0)).output[0] == 5.0);
  CHECK(forward(abs_net(), vec1(-5.0)).output[0] == 5.0);
}

TEST_CASE("forward input validation") {
  const Mlp net = abs_net();
  CHECK_THROWS_AS(forward(net, Eigen::VectorXd::Zero(2)), DimensionMismatch);
  Eigen::VectorXd bad(1);
  bad[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(forward(net, bad), NonFiniteInput);
}

TEST_CASE("model invariants enforced") {
  AffineLayer bad_bias{Eigen::MatrixXd::Identity(2, 2),
                       Eigen::VectorXd::Zero(3), false};
  CHECK_THROWS_AS(Mlp({bad_bias}), InvalidModel);

  AffineLayer a{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), true};
  AffineLayer mismatched{Eigen::MatrixXd::Identity(3, 3),
                         Eigen::VectorXd::Zero(3), false};
  CHECK_THROWS_AS(Mlp({a, mismatched}), InvalidModel);

  AffineLayer relu_last{Eigen::MatrixXd::Identity(2, 2),
                        Eigen::VectorXd::Zero(2), true};
  CHECK_THROWS_AS(Mlp({relu_last}), InvalidModel);

  AffineLayer nan_weight{Eigen::MatrixXd::Constant(
                             1, 1, std::numeric_limits<double>::quiet_NaN()),
                         Eigen::VectorXd::Zero(1), false};
  CHECK_THROWS_AS(Mlp({nan_weight}), InvalidModel);
}

TEST_CASE("jacobian of linear and relu nets") {
  const Mlp linear({{Eigen::MatrixXd::Constant(1, 1, 2.0),
                     Eigen::VectorXd::Zero(1), false}});
  for (double x : {-3.0, 0.0, 7.5}) {
    CHECK(clarke_jacobian(linear, forward(linear, vec1(x)))(0, 0) == 2.0);
  }

  const Mlp relu = scalar_net(1.0, true, 1.0);
  CHECK(clarke_jacobian(relu, forward(relu, vec1(-1.0)))(0, 0) == 0.0);
  CHECK(clarke_jacobian(relu, forward(relu, vec1(1.0)))(0, 0) == 1.0);
  // Selection convention: derivative 0 at a preactivation of exactly 0.
  CHECK(clarke_jacobian(relu, forward(relu, vec1(0.0)))(0, 0) == 0.0);
}

TEST_CASE("activation pattern of the abs net") {
  const Mlp net = abs_net();
  CHECK(activation_pattern(net, vec1(5.0)) == std::vector<bool>{true, false});
  CHECK(activation_pattern(net, vec1(-5.0)) == std::vector<bool>{false, true});
  CHECK(activation_pattern(net, vec1(0.0)) == std::vector<bool>{false, false});
}

TEST_CASE("jacobian matches finite differences on random nets") {
  Rng rng(1234);
  int checked = 0;
  for (std::uint64_t net_seed = 0; checked < 100; ++net_seed) {
    const Mlp net = init_mlp({2, 8, 8, 1}, net_seed);
    Eigen::VectorXd x(2);
    bool found = false;
    for (int attempt = 0; attempt < 100 && !found; ++attempt) {
      x << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
      found = away_from_kinks(forward(net, x), 1e-4);
    }
    if (!found) continue;

    const Eigen::MatrixXd jac = clarke_jacobian(net, forward(net, x));
    const Eigen::MatrixXd fd = fd_jacobian(net, x, 1e-6);
    for (Eigen::Index i = 0; i < jac.rows(); ++i) {
      for (Eigen::Index j = 0; j < jac.cols(); ++j) {
        const double scale =
            std::max({std::abs(jac(i, j)), std::abs(fd(i, j)), 1e-4});
        CHECK(std::abs(jac(i, j) - fd(i, j)) / scale <= 1e-4);
      }
    }
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("equal patterns give bitwise-equal jacobians") {
  Rng rng(555);
  for (std::uint64_t net_seed = 0; net_seed < 20; ++net_seed) {
    const Mlp net = init_mlp({3, 6, 6, 2}, net_seed);
    Eigen::VectorXd x(3);
    for (Eigen::Index i = 0; i < 3; ++i) x[i] = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd y = x + Eigen::VectorXd::Constant(3, 1e-9);

    if (activation_pattern(net, x) != activation_pattern(net, y)) continue;
    const Eigen::MatrixXd gx = clarke_jacobian(net, forward(net, x));
    const Eigen::MatrixXd gy = clarke_jacobian(net, forward(net, y));
    CHECK(gx == gy);  // same masked products, bit for bit
  }
}

TEST_CASE("no-relu nets degenerate to the weight product") {
  Rng rng(77);
  Eigen::MatrixXd w1(3, 2), w2(1, 3);
  for (Eigen::Index i = 0; i < w1.size(); ++i) {
    w1(i / 2, i % 2) = rng.uniform(-1.0, 1.0);
  }
  for (Eigen::Index i = 0; i < w2.size(); ++i) w2(0, i) = rng.uniform(-1.0, 1.0);
  const Mlp net({{w1, Eigen::VectorXd::Ones(3), false},
                 {w2, Eigen::VectorXd::Ones(1), false}});

  const Eigen::MatrixXd expected = w2 * w1;
  Eigen::VectorXd a(2), b(2);
  a << 0.3, -0.8;
  b << -5.0, 2.0;
  const Eigen::MatrixXd ga = clarke_jacobian(net, forward(net, a));
  const Eigen::MatrixXd gb = clarke_jacobian(net, forward(net, b));
  CHECK(ga == gb);  // constant in x
  CHECK((ga - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("forward is pure") {
  const Mlp net = init_mlp({2, 5, 1}, 42);
  Eigen::VectorXd x(2);
  x << 0.25, -0.75;
  const EvalTape t1 = forward(net, x);
  const EvalTape t2 = forward(net, x);
  CHECK(t1.output == t2.output);
  CHECK(t1.pattern == t2.pattern);
  REQUIRE(t1.preactivations.size() == t2.preactivations.size());
  for (std::size_t i = 0; i < t1.preactivations.size(); ++i) {
    CHECK(t1.preactivations[i] == t2.preactivations[i]);
  }
}

TEST_CASE("pattern bit iff stored preactivation positive") {
  const Mlp net = init_mlp({2, 8, 8, 1}, 3);
  Rng rng(8);
  Eigen::VectorXd x(2);
  for (int trial = 0; trial < 50; ++trial) {
    x << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
    const EvalTape tape = forward(net, x);
    std::size_t bit = 0;
    for (const Eigen::VectorXd& z : tape.preactivations) {
      for (Eigen::Index j = 0; j < z.size(); ++j, ++bit) {
        CHECK(tape.pattern[bit] == (z[j] > 0.0));
      }
    }
    CHECK(bit == tape.pattern.size());
  }
}

}  // TEST_SUITE
