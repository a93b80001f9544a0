// lipest: estimate local Lipschitz constants of ReLU networks by sampling
// generalized-Jacobian norms.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lipest/data_train.hpp"
#include "lipest/estimators.hpp"
#include "lipest/io.hpp"
#include "lipest/net.hpp"
#include "lipest/norms.hpp"
#include "lipest/oracle.hpp"

namespace {

using namespace lipest;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitIo = 4;

std::string quoted(const std::string& s) { return "\"" + json_escape(s) + "\""; }

std::vector<Eigen::Index> parse_arch(const std::string& s) {
  std::vector<Eigen::Index> arch;
  std::istringstream in(s);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(cell, &used);
      if (used != cell.size() || v < 1) throw std::invalid_argument(cell);
      arch.push_back(static_cast<Eigen::Index>(v));
    } catch (const std::exception&) {
      throw ConfigError("invalid architecture '" + s +
                        "' (expected e.g. 2,16,16,1)");
    }
  }
  if (arch.size() < 2) {
    throw ConfigError("architecture needs at least input and output dims");
  }
  return arch;
}

std::string arch_label(const std::vector<Eigen::Index>& arch) {
  std::string out;
  for (std::size_t i = 0; i < arch.size(); ++i) {
    if (i > 0) out += "-";
    out += std::to_string(arch[i]);
  }
  return out;
}

Box resolve_domain(const std::string& domain_path, Eigen::Index dim) {
  if (domain_path.empty()) return Box::centered_cube(dim, 1.0);
  Box box = load_domain(domain_path);
  if (box.dim() != dim) {
    throw DimensionMismatch("domain dimension " + std::to_string(box.dim()) +
                            " does not match model input dim " +
                            std::to_string(dim));
  }
  return box;
}

std::string manifest_path(const std::string& out) {
  return out + ".manifest.json";
}

// ---- gen-data --------------------------------------------------------------

struct GenDataArgs {
  std::int64_t dim = 2;
  int spheres = 3;
  std::int64_t points = 800;
  std::string domain;
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_gen_data(const GenDataArgs& a) {
  const Box box = a.domain.empty()
                      ? Box::centered_cube(static_cast<Eigen::Index>(a.dim), 1.0)
                      : load_domain(a.domain);
  if (box.dim() != a.dim) {
    throw DimensionMismatch("domain file dimension does not match --dim");
  }
  const Dataset data =
      gen_spheres(static_cast<Eigen::Index>(a.dim), a.spheres, a.points, box, a.seed);
  save_dataset(data, a.out);

  Manifest m;
  m.command = "gen-data";
  m.seed = a.seed;
  if (!a.domain.empty()) m.inputs.emplace_back("domain", a.domain);
  m.outputs.emplace_back("dataset", a.out);
  m.config = {{"dim", std::to_string(a.dim)},
              {"spheres", std::to_string(a.spheres)},
              {"points", std::to_string(a.points)},
              {"domain_low", vector_json(box.low)},
              {"domain_high", vector_json(box.high)},
              {"seed", std::to_string(a.seed)}};
  save_manifest(m, manifest_path(a.out));
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string arch = "2,16,16,1";
  double lr = 5e-4;
  std::int64_t epochs = 500;
  std::int64_t batch = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string loss_out;
};

void cmd_train(const TrainArgs& a) {
  if (!(a.lr > 0.0)) throw ConfigError("--lr must be > 0");
  if (a.epochs < 1) throw ConfigError("--epochs must be >= 1");
  const std::vector<Eigen::Index> arch = parse_arch(a.arch);
  const Dataset data = load_dataset(a.data);
  if (!data.inputs.empty() && data.inputs[0].size() != arch.front()) {
    throw DimensionMismatch("dataset input dim " +
                            std::to_string(data.inputs[0].size()) +
                            " does not match architecture input " +
                            std::to_string(arch.front()));
  }

  TrainConfig config;
  config.learning_rate = a.lr;
  config.epochs = a.epochs;
  config.batch = a.batch;
  config.seed = a.seed;

  const Mlp initial = init_mlp(arch, a.seed);
  TrainResult result = train(initial, data, config);
  save_model(result.net, a.out);

  if (!a.loss_out.empty()) {
    std::string csv = "epoch,loss\n";
    for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
      csv += std::to_string(e) + "," + format_double(result.loss_history[e]) + "\n";
    }
    write_text_file(a.loss_out, csv);
  }

  Manifest m;
  m.command = "train";
  m.seed = a.seed;
  m.inputs.emplace_back("data", a.data);
  m.outputs.emplace_back("model", a.out);
  if (!a.loss_out.empty()) m.outputs.emplace_back("loss_history", a.loss_out);
  m.config = {{"arch", quoted(arch_label(arch))},
              {"lr", format_double(a.lr)},
              {"epochs", std::to_string(a.epochs)},
              {"batch", std::to_string(a.batch)},
              {"seed", std::to_string(a.seed)}};
  save_manifest(m, manifest_path(a.out));
}

// ---- estimate ----------------------------------------------------------------

struct EstimateArgs {
  std::string model;
  std::string alg = "uniform";
  std::int64_t samples = 10000;
  std::string alpha = "inf";
  std::string beta = "inf";
  std::int64_t k = 2;
  double c = 10.0;
  double tm = 2.0;
  std::int64_t n0 = 10;
  std::string sigma_mode = "stddev";
  std::uint64_t seed = 0;
  std::string domain;
  int threads = 1;
  std::string out;
};

std::vector<std::pair<std::string, std::string>> estimator_config_json(
    const EstimatorConfig& config) {
  return {{"algorithm", quoted(to_string(config.algorithm))},
          {"samples", std::to_string(config.samples)},
          {"alpha", quoted(to_string(config.pair.alpha))},
          {"beta", quoted(to_string(config.pair.beta))},
          {"k", std::to_string(config.k_divisions)},
          {"c", format_double(config.c)},
          {"tm", format_double(config.t_m)},
          {"n0", std::to_string(config.n0)},
          {"sigma_mode", quoted(to_string(config.sigma_mode))},
          {"seed", std::to_string(config.seed)},
          {"threads", std::to_string(config.threads)}};
}

void cmd_estimate(const EstimateArgs& a) {
  EstimatorConfig config;
  config.algorithm = parse_algorithm(a.alg);
  config.samples = a.samples;
  config.pair = {parse_norm_tag(a.alpha), parse_norm_tag(a.beta)};
  config.k_divisions = a.k;
  config.c = a.c;
  config.t_m = a.tm;
  config.n0 = a.n0;
  config.sigma_mode = parse_sigma_mode(a.sigma_mode);
  config.seed = a.seed;
  config.threads = a.threads;
  config.validate();

  const Mlp net = load_model(a.model);
  const Box domain = resolve_domain(a.domain, net.input_dim());
  const EstimateReport report = run_estimate(net, domain, config);
  const std::string rendered = render_estimate_report(report, config);

  if (a.out.empty()) {
    std::cout << rendered;
    return;
  }
  write_text_file(a.out, rendered);

  Manifest m;
  m.command = "estimate";
  m.seed = a.seed;
  m.inputs.emplace_back("model", a.model);
  if (!a.domain.empty()) m.inputs.emplace_back("domain", a.domain);
  m.outputs.emplace_back("report", a.out);
  m.config = estimator_config_json(config);
  m.config.emplace_back("domain_low", vector_json(domain.low));
  m.config.emplace_back("domain_high", vector_json(domain.high));
  save_manifest(m, manifest_path(a.out));
}

// ---- oracle ------------------------------------------------------------------

struct OracleArgs {
  std::string model;
  std::string mode;
  std::int64_t grid = 400;
  bool jitter = false;
  std::string alpha = "inf";
  std::string beta = "inf";
  std::string domain;
  int threads = 1;
  std::string out;
};

void cmd_oracle(const OracleArgs& a) {
  const NormPair pair{parse_norm_tag(a.alpha), parse_norm_tag(a.beta)};
  const Mlp net = load_model(a.model);
  const Box domain = resolve_domain(a.domain, net.input_dim());

  OracleResult result;
  OracleReportExtras extras;
  extras.mode = a.mode;
  if (a.mode == "grid") {
    result = grid_oracle(net, domain, {a.grid, a.jitter}, pair, a.threads);
    extras.grid = a.grid;
    extras.jitter = a.jitter;
  } else if (a.mode == "breakpoints") {
    extras.breakpoint_count =
        static_cast<std::int64_t>(enumerate_breakpoints(net, domain).size());
    result = breakpoint_oracle_1d(net, domain, pair);
  } else {
    throw ConfigError("--mode must be grid or breakpoints");
  }

  const std::string rendered = render_oracle_report(result, pair, extras);
  if (a.out.empty()) {
    std::cout << rendered;
    return;
  }
  write_text_file(a.out, rendered);

  Manifest m;
  m.command = "oracle";
  m.inputs.emplace_back("model", a.model);
  if (!a.domain.empty()) m.inputs.emplace_back("domain", a.domain);
  m.outputs.emplace_back("report", a.out);
  m.config = {{"mode", quoted(a.mode)},
              {"grid", std::to_string(a.grid)},
              {"jitter", a.jitter ? "true" : "false"},
              {"alpha", quoted(a.alpha)},
              {"beta", quoted(a.beta)},
              {"threads", std::to_string(a.threads)},
              {"domain_low", vector_json(domain.low)},
              {"domain_high", vector_json(domain.high)}};
  save_manifest(m, manifest_path(a.out));
}

// ---- heatmap -----------------------------------------------------------------

struct HeatmapArgs {
  std::string model;
  std::int64_t grid = 400;
  std::string alpha = "inf";
  std::string beta = "inf";
  std::string domain;
  std::string out;
};

void cmd_heatmap(const HeatmapArgs& a) {
  const NormPair pair{parse_norm_tag(a.alpha), parse_norm_tag(a.beta)};
  const Mlp net = load_model(a.model);
  const Box domain = resolve_domain(a.domain, net.input_dim());
  write_heatmap_csv(net, domain, a.grid, pair, a.out);

  Manifest m;
  m.command = "heatmap";
  m.inputs.emplace_back("model", a.model);
  if (!a.domain.empty()) m.inputs.emplace_back("domain", a.domain);
  m.outputs.emplace_back("heatmap", a.out);
  m.config = {{"grid", std::to_string(a.grid)},
              {"alpha", quoted(a.alpha)},
              {"beta", quoted(a.beta)},
              {"domain_low", vector_json(domain.low)},
              {"domain_high", vector_json(domain.high)}};
  save_manifest(m, manifest_path(a.out));
}

// ---- bench -------------------------------------------------------------------

struct BenchArgs {
  std::string suite;
  int threads = 1;
  std::string out;
};

struct SuiteSpec {
  std::vector<Eigen::Index> arch;
  std::vector<std::uint64_t> seeds;
  std::vector<std::int64_t> budgets;
  std::vector<Algorithm> algorithms;
  NormPair pair{NormTag::Inf, NormTag::Inf};
  std::int64_t k = 2;
  double c = 10.0;
  double tm = 2.0;
  std::int64_t n0 = 10;
  SigmaMode sigma_mode = SigmaMode::Stddev;
  std::int64_t data_points = 800;
  int data_spheres = 3;
  double lr = 5e-4;
  std::int64_t epochs = 500;
  bool has_domain = false;
  Box domain;
  std::string ref_mode = "grid";  // grid | breakpoints | uniform
  std::int64_t ref_grid = 2001;
  std::int64_t ref_samples = 1000000;
  std::uint64_t ref_seed = 0;
};

SuiteSpec load_suite(const std::string& path) {
  const std::string text = read_text_file(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ConfigError(path + ": suite file is empty");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path, e.what());
  }
  if (!j.is_object()) throw IoError(path, "expected a JSON object");

  SuiteSpec spec;
  try {
    if (!j.contains("arch")) throw ConfigError("suite: arch missing");
    for (const auto& v : j.at("arch")) {
      spec.arch.push_back(v.get<Eigen::Index>());
    }
    for (const auto& v : j.value("seeds", nlohmann::json::array())) {
      spec.seeds.push_back(v.get<std::uint64_t>());
    }
    for (const auto& v : j.value("budgets", nlohmann::json::array())) {
      spec.budgets.push_back(v.get<std::int64_t>());
    }
    for (const auto& v : j.value("algorithms", nlohmann::json::array())) {
      spec.algorithms.push_back(parse_algorithm(v.get<std::string>()));
    }
    spec.pair.alpha = parse_norm_tag(j.value("alpha", "inf"));
    spec.pair.beta = parse_norm_tag(j.value("beta", "inf"));
    spec.k = j.value("k", spec.k);
    spec.c = j.value("c", spec.c);
    spec.tm = j.value("tm", spec.tm);
    spec.n0 = j.value("n0", spec.n0);
    spec.sigma_mode = parse_sigma_mode(j.value("sigma_mode", "stddev"));
    if (j.contains("data")) {
      spec.data_points = j["data"].value("points", spec.data_points);
      spec.data_spheres = j["data"].value("spheres", spec.data_spheres);
    }
    if (j.contains("train")) {
      spec.lr = j["train"].value("lr", spec.lr);
      spec.epochs = j["train"].value("epochs", spec.epochs);
    }
    if (j.contains("domain")) {
      Eigen::VectorXd lo(j["domain"].at("low").size());
      Eigen::VectorXd hi(j["domain"].at("high").size());
      for (Eigen::Index i = 0; i < lo.size(); ++i) {
        lo[i] = j["domain"]["low"][static_cast<std::size_t>(i)].get<double>();
        hi[i] = j["domain"]["high"][static_cast<std::size_t>(i)].get<double>();
      }
      spec.domain = Box(lo, hi);
      spec.has_domain = true;
    }
    if (j.contains("reference")) {
      spec.ref_mode = j["reference"].value("mode", spec.ref_mode);
      spec.ref_grid = j["reference"].value("grid", spec.ref_grid);
      spec.ref_samples = j["reference"].value("samples", spec.ref_samples);
      spec.ref_seed = j["reference"].value("seed", spec.ref_seed);
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path, e.what());
  }

  if (spec.arch.size() < 2) throw ConfigError("suite: arch needs >= 2 dims");
  if (spec.seeds.empty()) throw ConfigError("suite: seeds list is empty");
  if (spec.budgets.empty()) throw ConfigError("suite: budgets list is empty");
  if (spec.algorithms.empty()) throw ConfigError("suite: algorithms list is empty");
  if (spec.ref_mode != "grid" && spec.ref_mode != "breakpoints" &&
      spec.ref_mode != "uniform") {
    throw ConfigError("suite: reference.mode must be grid, breakpoints or uniform");
  }
  return spec;
}

void cmd_bench(const BenchArgs& a) {
  const SuiteSpec spec = load_suite(a.suite);
  const Eigen::Index dim = spec.arch.front();
  const Box domain =
      spec.has_domain ? spec.domain : Box::centered_cube(dim, 1.0);
  if (domain.dim() != dim) {
    throw DimensionMismatch("suite domain dimension does not match arch input");
  }

  std::string csv = "arch,seed,algorithm,budget,status,estimate,reference,rel_error,wall_time_s\n";
  const std::string label = arch_label(spec.arch);

  for (const std::uint64_t seed : spec.seeds) {
    const Dataset data =
        gen_spheres(dim, spec.data_spheres, spec.data_points, domain, seed);
    TrainConfig tc;
    tc.learning_rate = spec.lr;
    tc.epochs = spec.epochs;
    tc.seed = seed;
    const Mlp net = train(init_mlp(spec.arch, seed), data, tc).net;

    double reference = 0.0;
    if (spec.ref_mode == "grid") {
      reference =
          grid_oracle(net, domain, {spec.ref_grid, false}, spec.pair, a.threads)
              .value;
    } else if (spec.ref_mode == "breakpoints") {
      reference = breakpoint_oracle_1d(net, domain, spec.pair).value;
    } else {
      EstimatorConfig rc;
      rc.algorithm = Algorithm::Uniform;
      rc.samples = spec.ref_samples;
      rc.pair = spec.pair;
      rc.seed = spec.ref_seed;
      rc.threads = a.threads;
      reference = estimate_uniform(net, domain, rc).estimate;
    }

    for (const Algorithm alg : spec.algorithms) {
      for (const std::int64_t budget : spec.budgets) {
        csv += label + "," + std::to_string(seed) + "," + to_string(alg) + "," +
               std::to_string(budget) + ",";
        try {
          EstimatorConfig config;
          config.algorithm = alg;
          config.samples = budget;
          config.pair = spec.pair;
          config.k_divisions = spec.k;
          config.c = spec.c;
          config.t_m = spec.tm;
          config.n0 = spec.n0;
          config.sigma_mode = spec.sigma_mode;
          config.seed = seed;
          config.threads = a.threads;
          const EstimateReport report = run_estimate(net, domain, config);
          const double rel_error =
              (reference - report.estimate) / reference;
          csv += "ok," + format_double(report.estimate) + "," +
                 format_double(reference) + "," + format_double(rel_error) +
                 "," + format_double(report.wall_time_s) + "\n";
        } catch (const Error& e) {
          csv += "failed,,,,\n";
        }
      }
    }
  }
  write_text_file(a.out, csv);

  Manifest m;
  m.command = "bench";
  m.inputs.emplace_back("suite", a.suite);
  m.outputs.emplace_back("results", a.out);
  m.config = {{"threads", std::to_string(a.threads)},
              {"arch", quoted(label)},
              {"runs", std::to_string(spec.seeds.size() *
                                      spec.algorithms.size() *
                                      spec.budgets.size())}};
  save_manifest(m, manifest_path(a.out));
}

// ---- wiring ------------------------------------------------------------------

int run(int argc, char** argv) {
  CLI::App app{"Sampling-based estimation of local Lipschitz constants of "
               "ReLU networks"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config");
  app.require_subcommand(1);

  GenDataArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  gen->add_option("--dim", gen_args.dim, "Input dimension")->required();
  gen->add_option("--spheres", gen_args.spheres, "Number of hyperspheres");
  gen->add_option("--points", gen_args.points, "Number of points");
  gen->add_option("--domain", gen_args.domain, "Domain JSON file");
  gen->add_option("--seed", gen_args.seed, "RNG seed");
  gen->add_option("--out", gen_args.out, "Output dataset JSON")->required();

  TrainArgs train_args;
  CLI::App* tr = app.add_subcommand("train", "Train an MLP on a dataset");
  tr->add_option("--data", train_args.data, "Dataset JSON or CSV")->required();
  tr->add_option("--arch", train_args.arch, "Architecture, e.g. 2,16,16,1");
  tr->add_option("--lr", train_args.lr, "Learning rate");
  tr->add_option("--epochs", train_args.epochs, "Training epochs");
  tr->add_option("--batch", train_args.batch, "Batch size (0 = full batch)");
  tr->add_option("--seed", train_args.seed, "RNG seed");
  tr->add_option("--out", train_args.out, "Output model JSON")->required();
  tr->add_option("--loss-out", train_args.loss_out, "Optional loss history CSV");

  EstimateArgs est_args;
  CLI::App* est = app.add_subcommand("estimate", "Estimate the local Lipschitz constant");
  est->add_option("--model", est_args.model, "Model JSON")->required();
  est->add_option("--alg", est_args.alg, "uniform | partitioned | ucb");
  est->add_option("--samples", est_args.samples, "Sample budget N");
  est->add_option("--alpha", est_args.alpha, "Input norm: 1 | 2 | inf");
  est->add_option("--beta", est_args.beta, "Output norm: 1 | 2 | inf");
  est->add_option("--k", est_args.k, "Divisions per dim (partitioned)");
  est->add_option("--c", est_args.c, "UCB exploration constant");
  est->add_option("--tm", est_args.tm, "UCB subdivision time multiplier");
  est->add_option("--n0", est_args.n0, "UCB bootstrap threshold");
  est->add_option("--sigma-mode", est_args.sigma_mode, "stddev | variance");
  est->add_option("--seed", est_args.seed, "RNG seed");
  est->add_option("--domain", est_args.domain, "Domain JSON (default [-1,1]^d)");
  est->add_option("--threads", est_args.threads, "Worker thread cap");
  est->add_option("--out", est_args.out, "Report JSON (stdout when omitted)");

  OracleArgs oracle_args;
  CLI::App* orc = app.add_subcommand("oracle", "Reference value by grid or breakpoints");
  orc->add_option("--model", oracle_args.model, "Model JSON")->required();
  orc->add_option("--mode", oracle_args.mode, "grid | breakpoints")->required();
  orc->add_option("--grid", oracle_args.grid, "Points per dimension");
  orc->add_flag("--jitter", oracle_args.jitter, "Also evaluate cell centers");
  orc->add_option("--alpha", oracle_args.alpha, "Input norm");
  orc->add_option("--beta", oracle_args.beta, "Output norm");
  orc->add_option("--domain", oracle_args.domain, "Domain JSON");
  orc->add_option("--threads", oracle_args.threads, "Worker thread cap");
  orc->add_option("--out", oracle_args.out, "Report JSON (stdout when omitted)");

  HeatmapArgs heat_args;
  CLI::App* heat = app.add_subcommand("heatmap", "Jacobian-norm CSV over a 2-D grid");
  heat->add_option("--model", heat_args.model, "Model JSON")->required();
  heat->add_option("--grid", heat_args.grid, "Points per dimension");
  heat->add_option("--alpha", heat_args.alpha, "Input norm");
  heat->add_option("--beta", heat_args.beta, "Output norm");
  heat->add_option("--domain", heat_args.domain, "Domain JSON");
  heat->add_option("--out", heat_args.out, "Output CSV")->required();

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Run an estimation benchmark suite");
  bench->add_option("--suite", bench_args.suite, "Suite JSON")->required();
  bench->add_option("--threads", bench_args.threads, "Worker thread cap");
  bench->add_option("--out", bench_args.out, "Results CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    const CLI::App* sub = app.get_subcommands().empty()
                              ? &app
                              : app.get_subcommands().front();
    std::cerr << sub->help();
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      cmd_gen_data(gen_args);
    } else if (tr->parsed()) {
      cmd_train(train_args);
    } else if (est->parsed()) {
      cmd_estimate(est_args);
    } else if (orc->parsed()) {
      cmd_oracle(oracle_args);
    } else if (heat->parsed()) {
      cmd_heatmap(heat_args);
    } else if (bench->parsed()) {
      cmd_bench(bench_args);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
