#include "lipest/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace lipest {

NormTag dual(NormTag tag) {
  switch (tag) {
    case NormTag::One:
      return NormTag::Inf;
    case NormTag::Inf:
      return NormTag::One;
    case NormTag::Two:
      return NormTag::Two;
  }
  return NormTag::Two;  // unreachable
}

std::string to_string(NormTag tag) {
  switch (tag) {
    case NormTag::One:
      return "1";
    case NormTag::Two:
      return "2";
    case NormTag::Inf:
      return "inf";
  }
  return "?";
}

NormTag parse_norm_tag(const std::string& s) {
  if (s == "1") return NormTag::One;
  if (s == "2") return NormTag::Two;
  if (s == "inf") return NormTag::Inf;
  throw ConfigError("invalid norm tag '" + s + "' (expected 1, 2 or inf)");
}

bool is_supported(const NormPair& pair) {
  return pair.alpha == NormTag::One || pair.beta == NormTag::Inf ||
         (pair.alpha == NormTag::Two && pair.beta == NormTag::Two);
}

double vector_norm(const Eigen::VectorXd& v, NormTag tag) {
  switch (tag) {
    case NormTag::One:
      return v.lpNorm<1>();
    case NormTag::Two:
      return v.norm();
    case NormTag::Inf:
      return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
  }
  return 0.0;  // unreachable
}

namespace {

// One power-iteration sweep on the PSD matrix B, from start vector v.
// Returns the dominant-eigenvalue estimate, or nullopt when the run
// stagnated (landed in the null space or failed the tolerance within the
// iteration cap).
std::optional<double> power_sweep(const Eigen::MatrixXd& B, Eigen::VectorXd v) {
  constexpr int kMaxIter = 10000;
  constexpr double kRelTol = 1e-12;
  double lambda_prev = 0.0;
  for (int it = 0; it < kMaxIter; ++it) {
    const Eigen::VectorXd w = B * v;
    const double lambda = v.dot(w);  // Rayleigh quotient, v is unit
    const double norm_w = w.norm();
    if (norm_w == 0.0) return std::nullopt;  // v in the null space of B
    v = w / norm_w;
    if (it > 0 &&
        std::abs(lambda - lambda_prev) <= kRelTol * std::max(std::abs(lambda), 1e-300)) {
      return lambda;
    }
    lambda_prev = lambda;
  }
  return std::nullopt;
}

double spectral_norm(const Eigen::MatrixXd& G) {
  const Eigen::MatrixXd B = G.transpose() * G;
  const auto n = B.rows();
  if (B.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  Eigen::VectorXd start = Eigen::VectorXd::Ones(n);
  start /= start.norm();
  std::optional<double> lambda = power_sweep(B, start);
  if (!lambda) {
    // Fixed perturbed restart; the all-ones start can sit in the null space.
    Eigen::VectorXd restart(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      restart[i] = 1.0 + static_cast<double>(i + 1) / static_cast<double>(n);
    }
    restart /= restart.norm();
    lambda = power_sweep(B, restart);
  }
  if (!lambda) return 0.0;
  return std::sqrt(std::max(*lambda, 0.0));
}

}  // namespace

double induced_norm(const Eigen::MatrixXd& G, const NormPair& pair) {
  if (!G.allFinite()) throw NonFiniteMatrix("matrix has NaN or Inf entries");

  if (pair.alpha == NormTag::One) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < G.cols(); ++j) {
      best = std::max(best, vector_norm(G.col(j), pair.beta));
    }
    return best;
  }
  if (pair.beta == NormTag::Inf) {
    const NormTag row_norm = dual(pair.alpha);
    double best = 0.0;
    for (Eigen::Index i = 0; i < G.rows(); ++i) {
      best = std::max(best, vector_norm(G.row(i).transpose(), row_norm));
    }
    return best;
  }
  if (pair.alpha == NormTag::Two && pair.beta == NormTag::Two) {
    return spectral_norm(G);
  }
  throw UnsupportedNormPair("induced norm (" + to_string(pair.alpha) + "," +
                            to_string(pair.beta) +
                            ") has no tractable closed form");
}

}  // namespace lipest
