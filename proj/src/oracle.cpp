#include "lipest/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>

#include "lipest/estimators.hpp"

namespace lipest {

namespace {

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

struct Best {
  double value = -1.0;  // any real value beats the empty state
  Eigen::VectorXd point;

  void consider(double v, const Eigen::VectorXd& x) {
    if (point.size() == 0 || v > value ||
        (v == value && lex_less(x, point))) {
      value = v;
      point = x;
    }
  }

  void merge(const Best& other) {
    if (other.point.size() == 0) return;
    consider(other.value, other.point);
  }
};

// Decodes flattened lattice index -> point, dimension 0 most significant.
Eigen::VectorXd decode_lattice_point(const Box& box, std::int64_t points_per_dim,
                                     std::int64_t flat, bool centers) {
  const Eigen::Index d = box.dim();
  Eigen::VectorXd x(d);
  const std::int64_t per_dim = centers ? points_per_dim - 1 : points_per_dim;
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    const std::int64_t j = flat % per_dim;
    flat /= per_dim;
    if (centers) {
      const double step = box.side(i) / static_cast<double>(points_per_dim - 1);
      x[i] = box.low[i] + (static_cast<double>(j) + 0.5) * step;
    } else {
      x[i] = lattice_coordinate(box, i, j, points_per_dim);
    }
  }
  return x;
}

Best scan_lattice(const Mlp& net, const Box& box, std::int64_t points_per_dim,
                  bool centers, std::int64_t total, const NormPair& pair,
                  int threads) {
  const int workers = std::max(
      1, std::min<int>(threads, static_cast<int>(std::min<std::int64_t>(
                                    total, 64))));
  std::vector<Best> partial(static_cast<std::size_t>(workers));
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&](int w) {
    try {
      Best local;
      const std::int64_t begin = total * w / workers;
      const std::int64_t end = total * (w + 1) / workers;
      for (std::int64_t flat = begin; flat < end; ++flat) {
        const Eigen::VectorXd x =
            decode_lattice_point(box, points_per_dim, flat, centers);
        local.consider(sample_value(net, pair, x), x);
      }
      partial[static_cast<std::size_t>(w)] = std::move(local);
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  Best best;
  for (const Best& p : partial) best.merge(p);
  return best;
}

}  // namespace

double lattice_coordinate(const Box& box, Eigen::Index dim, std::int64_t j,
                          std::int64_t points_per_dim) {
  if (j == points_per_dim - 1) return box.high[dim];
  const double step = box.side(dim) / static_cast<double>(points_per_dim - 1);
  return box.low[dim] + static_cast<double>(j) * step;
}

OracleResult grid_oracle(const Mlp& net, const Box& domain,
                         const GridSpec& spec, const NormPair& pair,
                         int threads) {
  if (spec.points_per_dim < 2) {
    throw ConfigError("grid needs at least 2 points per dimension");
  }
  if (domain.dim() != net.input_dim()) {
    throw DimensionMismatch("domain dimension does not match network input dim");
  }
  const Eigen::Index d = domain.dim();

  constexpr std::int64_t kMaxPoints = 100000000;  // 1e8 guard
  std::int64_t total = 1;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (total > kMaxPoints / spec.points_per_dim) {
      throw GridTooLarge("grid of " + std::to_string(spec.points_per_dim) +
                         "^" + std::to_string(d) + " points exceeds the 1e8 guard");
    }
    total *= spec.points_per_dim;
  }

  Best best =
      scan_lattice(net, domain, spec.points_per_dim, false, total, pair, threads);
  if (spec.include_midpoint_jitter) {
    std::int64_t centers = 1;
    for (Eigen::Index i = 0; i < d; ++i) centers *= spec.points_per_dim - 1;
    best.merge(scan_lattice(net, domain, spec.points_per_dim, true, centers,
                            pair, threads));
  }
  return {best.value, best.point};
}

namespace {

// Value and x-derivative of layer `target`'s preactivation at scalar input x,
// using the activation pattern along the way. Both are exact on any segment
// where no earlier preactivation changes sign.
void preactivation_and_slope(const Mlp& net, double x, std::size_t target,
                             Eigen::VectorXd& value, Eigen::VectorXd& slope) {
  Eigen::VectorXd h(1), dh(1);
  h[0] = x;
  dh[0] = 1.0;
  for (std::size_t l = 0; l <= target; ++l) {
    const AffineLayer& layer = net.layers()[l];
    Eigen::VectorXd z = layer.weights * h + layer.bias;
    Eigen::VectorXd dz = layer.weights * dh;
    if (l == target) {
      value = std::move(z);
      slope = std::move(dz);
      return;
    }
    if (layer.relu_after) {
      for (Eigen::Index j = 0; j < z.size(); ++j) {
        if (!(z[j] > 0.0)) {
          z[j] = 0.0;
          dz[j] = 0.0;
        }
      }
    }
    h = std::move(z);
    dh = std::move(dz);
  }
}

std::vector<double> sorted_dedup(std::vector<double> xs) {
  constexpr double kTol = 1e-12;
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double v : xs) {
    if (out.empty() || v - out.back() > kTol) out.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<double> enumerate_breakpoints(const Mlp& net, const Box& interval) {
  if (net.input_dim() != 1) {
    throw DimensionMismatch("breakpoint enumeration needs input dim 1");
  }
  if (interval.dim() != 1) {
    throw DimensionMismatch("breakpoint interval must be one-dimensional");
  }
  const double lo = interval.low[0];
  const double hi = interval.high[0];

  std::vector<double> breakpoints;
  Eigen::VectorXd value, slope;
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    if (!net.layers()[l].relu_after) continue;

    std::vector<double> knots;
    knots.push_back(lo);
    knots.insert(knots.end(), breakpoints.begin(), breakpoints.end());
    knots.push_back(hi);

    std::vector<double> found;
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
      const double a = knots[s];
      const double b = knots[s + 1];
      const double mid = 0.5 * (a + b);
      preactivation_and_slope(net, mid, l, value, slope);
      for (Eigen::Index j = 0; j < value.size(); ++j) {
        if (slope[j] == 0.0) continue;
        const double root = mid - value[j] / slope[j];
        if (root > a && root < b) found.push_back(root);
      }
    }
    if (!found.empty()) {
      found.insert(found.end(), breakpoints.begin(), breakpoints.end());
      breakpoints = sorted_dedup(std::move(found));
    }
  }
  return breakpoints;
}

OracleResult breakpoint_oracle_1d(const Mlp& net, const Box& interval,
                                  const NormPair& pair) {
  const std::vector<double> breakpoints = enumerate_breakpoints(net, interval);

  std::vector<double> knots;
  knots.push_back(interval.low[0]);
  knots.insert(knots.end(), breakpoints.begin(), breakpoints.end());
  knots.push_back(interval.high[0]);

  OracleResult result;
  result.value = -1.0;
  Eigen::VectorXd x(1);
  for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
    x[0] = 0.5 * (knots[s] + knots[s + 1]);
    const double v = sample_value(net, pair, x);
    if (result.argmax.size() == 0 || v > result.value) {
      result.value = v;
      result.argmax = x;
    }
  }
  return result;
}

}  // namespace lipest
