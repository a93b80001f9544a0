#include "lipest/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace lipest {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Uniform:
      return "uniform";
    case Algorithm::Partitioned:
      return "partitioned";
    case Algorithm::Ucb:
      return "ucb";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "uniform") return Algorithm::Uniform;
  if (s == "partitioned") return Algorithm::Partitioned;
  if (s == "ucb") return Algorithm::Ucb;
  throw ConfigError("invalid algorithm '" + s +
                    "' (expected uniform, partitioned or ucb)");
}

std::string to_string(SigmaMode m) {
  return m == SigmaMode::Stddev ? "stddev" : "variance";
}

SigmaMode parse_sigma_mode(const std::string& s) {
  if (s == "stddev") return SigmaMode::Stddev;
  if (s == "variance") return SigmaMode::Variance;
  throw ConfigError("invalid sigma mode '" + s +
                    "' (expected stddev or variance)");
}

void EstimatorConfig::validate() const {
  if (samples < 1) throw ConfigError("sample budget must be >= 1");
  if (!(t_m > 1.0)) throw ConfigError("subdivision multiplier t_m must be > 1");
  if (n0 < 1) throw ConfigError("bootstrap threshold n0 must be >= 1");
  if (c < 0.0) throw ConfigError("exploration constant c must be >= 0");
  if (k_divisions < 1) throw ConfigError("k divisions must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

double sample_value(const Mlp& net, const NormPair& pair,
                    const Eigen::VectorXd& x) {
  return induced_norm(clarke_jacobian(net, forward(net, x)), pair);
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Running lower bound r with its witness point and the milestone trace.
struct Tracker {
  double r = 0.0;
  Eigen::VectorXd argmax;
  std::vector<std::pair<std::int64_t, double>> trace;

  void observe(double value, const Eigen::VectorXd& x) {
    if (value > r) {
      r = value;
      argmax = x;
    } else if (argmax.size() == 0) {
      argmax = x;  // witness for all-zero landscapes
    }
  }

  void milestone(std::int64_t i, std::int64_t total) {
    if (i % 1000 == 0 || i == total) trace.emplace_back(i, r);
  }
};

// values[i] = sample_value(net, pair, points[i]); each point is evaluated
// independently, so splitting over threads cannot change any result bit.
void evaluate_batch(const Mlp& net, const NormPair& pair,
                    const std::vector<Eigen::VectorXd>& points,
                    std::vector<double>& values, int threads) {
  const std::size_t n = points.size();
  values.resize(n);
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = sample_value(net, pair, points[i]);
    }
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = static_cast<std::size_t>(w); i < n;
             i += static_cast<std::size_t>(workers)) {
          values[i] = sample_value(net, pair, points[i]);
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Shared core of Algorithms 1 and 2: a fixed region list, floor(N/R) draws
// per region and one extra for the first N mod R regions. Region r draws
// from its own derived stream, so a larger budget extends each region's
// sample set instead of reshuffling it.
EstimateReport run_fixed_regions(const Mlp& net, std::vector<Box> regions,
                                 const EstimatorConfig& config) {
  const std::int64_t n_regions = static_cast<std::int64_t>(regions.size());
  const std::int64_t base = config.samples / n_regions;
  const std::int64_t rem = config.samples % n_regions;

  std::vector<RegionStats> stats(regions.size());
  Tracker tracker;
  constexpr std::int64_t kChunk = 8192;
  std::vector<Eigen::VectorXd> points;
  std::vector<double> values;

  const auto start = Clock::now();
  std::int64_t drawn = 0;
  for (std::int64_t r = 0; r < n_regions; ++r) {
    std::int64_t remaining = base + (r < rem ? 1 : 0);
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(r)));
    while (remaining > 0) {
      const std::int64_t chunk = std::min(remaining, kChunk);
      points.clear();
      for (std::int64_t i = 0; i < chunk; ++i) {
        points.push_back(sample_uniform(regions[static_cast<std::size_t>(r)], rng));
      }
      evaluate_batch(net, config.pair, points, values, config.threads);
      for (std::int64_t i = 0; i < chunk; ++i) {
        ++drawn;
        update_stats(stats[static_cast<std::size_t>(r)],
                     values[static_cast<std::size_t>(i)],
                     points[static_cast<std::size_t>(i)]);
        tracker.observe(values[static_cast<std::size_t>(i)],
                        points[static_cast<std::size_t>(i)]);
        tracker.milestone(drawn, config.samples);
      }
      remaining -= chunk;
    }
  }

  EstimateReport report;
  report.estimate = tracker.r;
  report.argmax_x = tracker.argmax;
  report.samples_used = config.samples;
  report.wall_time_s = elapsed_seconds(start);
  report.regions.reserve(regions.size());
  for (std::size_t r = 0; r < regions.size(); ++r) {
    report.regions.push_back({std::move(regions[r]), std::move(stats[r])});
  }
  report.trace = std::move(tracker.trace);
  return report;
}

void check_domain(const Mlp& net, const Box& domain) {
  if (domain.dim() != net.input_dim()) {
    throw DimensionMismatch("domain dimension " + std::to_string(domain.dim()) +
                            " does not match network input dim " +
                            std::to_string(net.input_dim()));
  }
}

void check_pair(const NormPair& pair) {
  if (!is_supported(pair)) {
    throw UnsupportedNormPair("norm pair (" + to_string(pair.alpha) + "," +
                              to_string(pair.beta) + ") is not supported");
  }
}

}  // namespace

EstimateReport estimate_uniform(const Mlp& net, const Box& domain,
                                const EstimatorConfig& config) {
  config.validate();
  check_domain(net, domain);
  check_pair(config.pair);
  return run_fixed_regions(net, {domain}, config);
}

EstimateReport estimate_partitioned(const Mlp& net, const Box& domain,
                                    const EstimatorConfig& config) {
  config.validate();
  check_domain(net, domain);
  check_pair(config.pair);
  return run_fixed_regions(net, init_subregions(domain, config.k_divisions),
                           config);
}

double ucb_score(const RegionStats& stats, std::int64_t t,
                 const EstimatorConfig& config) {
  if (stats.n <= config.n0) return std::numeric_limits<double>::infinity();
  const double sigma = config.sigma_mode == SigmaMode::Stddev
                           ? stats.stddev()
                           : stats.variance();
  const double bonus =
      config.c *
      std::sqrt(std::log(static_cast<double>(t) + 1.0) /
                static_cast<double>(stats.n)) *
      sigma;
  return stats.max + bonus;
}

EstimateReport estimate_ucb(const Mlp& net, const Box& domain,
                            const EstimatorConfig& config) {
  config.validate();
  check_domain(net, domain);
  check_pair(config.pair);

  struct Region {
    Box box;
    RegionStats stats;
  };
  std::vector<Region> regions;
  regions.push_back({domain, {}});

  Rng rng(derive_seed(config.seed, 0));
  Tracker tracker;
  double deadline = config.t_m;  // running product t_m^k

  const auto start = Clock::now();
  for (std::int64_t i = 1; i <= config.samples; ++i) {
    // Strict > keeps the earliest-created region on ties, including
    // among +inf bootstrap scores.
    std::size_t selected = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < regions.size(); ++j) {
      const double score = ucb_score(regions[j].stats, i, config);
      if (score > best) {
        best = score;
        selected = j;
      }
    }

    // >= instead of == so that deadlines whose ceilings collapse onto the
    // same integer (possible for t_m close to 1) still fire one at a time.
    if (static_cast<double>(i) >= std::ceil(deadline)) {
      auto children = subdivide(regions[selected].box);
      regions.erase(regions.begin() + static_cast<std::ptrdiff_t>(selected));
      regions.push_back({std::move(children.first), {}});
      regions.push_back({std::move(children.second), {}});
      selected = regions.size() - 2;  // sample from the first child
      deadline *= config.t_m;
    }

    const Eigen::VectorXd x = sample_uniform(regions[selected].box, rng);
    const double value = sample_value(net, config.pair, x);
    update_stats(regions[selected].stats, value, x);
    tracker.observe(value, x);
    tracker.milestone(i, config.samples);
  }

  EstimateReport report;
  report.estimate = tracker.r;
  report.argmax_x = tracker.argmax;
  report.samples_used = config.samples;
  report.wall_time_s = elapsed_seconds(start);
  report.regions.reserve(regions.size());
  for (auto& region : regions) {
    report.regions.push_back({std::move(region.box), std::move(region.stats)});
  }
  report.trace = std::move(tracker.trace);
  return report;
}

EstimateReport run_estimate(const Mlp& net, const Box& domain,
                            const EstimatorConfig& config) {
  switch (config.algorithm) {
    case Algorithm::Uniform:
      return estimate_uniform(net, domain, config);
    case Algorithm::Partitioned:
      return estimate_partitioned(net, domain, config);
    case Algorithm::Ucb:
      return estimate_ucb(net, domain, config);
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace lipest
