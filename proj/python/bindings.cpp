#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "lipest/data_train.hpp"
#include "lipest/estimators.hpp"
#include "lipest/io.hpp"
#include "lipest/net.hpp"
#include "lipest/norms.hpp"
#include "lipest/oracle.hpp"

namespace py = pybind11;
using namespace lipest;

namespace {

using Rows = std::vector<std::vector<double>>;

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = v[i];
  }
  return out;
}

std::vector<double> from_vector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::MatrixXd to_matrix(const Rows& rows) {
  if (rows.empty()) throw DimensionMismatch("matrix needs at least one row");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw DimensionMismatch("ragged matrix rows");
    }
    out.row(static_cast<Eigen::Index>(i)) = to_vector(rows[i]).transpose();
  }
  return out;
}

Rows from_matrix(const Eigen::MatrixXd& m) {
  Rows rows(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows[static_cast<std::size_t>(i)] = from_vector(m.row(i).transpose());
  }
  return rows;
}

NormPair make_pair(const std::string& alpha, const std::string& beta) {
  return {parse_norm_tag(alpha), parse_norm_tag(beta)};
}

EstimatorConfig make_config(const std::string& algorithm, std::int64_t samples,
                            const std::string& alpha, const std::string& beta,
                            std::uint64_t seed, std::int64_t k, double c,
                            double tm, std::int64_t n0,
                            const std::string& sigma_mode, int threads) {
  EstimatorConfig config;
  config.algorithm = parse_algorithm(algorithm);
  config.samples = samples;
  config.pair = make_pair(alpha, beta);
  config.seed = seed;
  config.k_divisions = k;
  config.c = c;
  config.t_m = tm;
  config.n0 = n0;
  config.sigma_mode = parse_sigma_mode(sigma_mode);
  config.threads = threads;
  return config;
}

py::dict report_to_dict(const EstimateReport& report,
                        const EstimatorConfig& config) {
  py::dict out;
  out["estimate"] = report.estimate;
  out["argmax"] = from_vector(report.argmax_x);
  out["samples_used"] = report.samples_used;
  out["wall_time_s"] = report.wall_time_s;
  out["algorithm"] = to_string(config.algorithm);
  out["norm_pair"] =
      py::make_tuple(to_string(config.pair.alpha), to_string(config.pair.beta));
  out["seed"] = config.seed;
  py::list regions;
  for (const RegionReport& region : report.regions) {
    py::dict r;
    r["low"] = from_vector(region.box.low);
    r["high"] = from_vector(region.box.high);
    r["n"] = region.stats.n;
    if (region.stats.n > 0) {
      r["max"] = region.stats.max;
    } else {
      r["max"] = py::none();
    }
    regions.append(r);
  }
  out["regions"] = regions;
  py::list trace;
  for (const auto& [i, r] : report.trace) {
    trace.append(py::make_tuple(i, r));
  }
  out["trace"] = trace;
  return out;
}

}  // namespace

PYBIND11_MODULE(_lipest, m) {
  m.doc() = "Local Lipschitz constant estimation for ReLU networks";
  m.attr("__version__") = kVersion;

  py::register_exception<UnsupportedNormPair>(m, "UnsupportedNormPairError",
                                              PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatchError",
                                            PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<Box>(m, "Box")
      .def(py::init([](const std::vector<double>& low,
                       const std::vector<double>& high) {
             return Box(to_vector(low), to_vector(high));
           }),
           py::arg("low"), py::arg("high"))
      .def_property_readonly(
          "low", [](const Box& b) { return from_vector(b.low); })
      .def_property_readonly(
          "high", [](const Box& b) { return from_vector(b.high); })
      .def("volume", &Box::volume)
      .def("__repr__", [](const Box& b) {
        return "Box(dim=" + std::to_string(b.dim()) + ")";
      });

  py::class_<Mlp>(m, "Mlp")
      .def_property_readonly("input_dim", &Mlp::input_dim)
      .def_property_readonly("output_dim", &Mlp::output_dim)
      .def_property_readonly("n_layers",
                             [](const Mlp& n) { return n.layers().size(); })
      .def("__repr__", [](const Mlp& n) {
        return "Mlp(input_dim=" + std::to_string(n.input_dim()) +
               ", output_dim=" + std::to_string(n.output_dim()) + ")";
      });

  m.def(
      "mlp_from_layers",
      [](const std::vector<std::tuple<Rows, std::vector<double>, bool>>& spec) {
        std::vector<AffineLayer> layers;
        for (const auto& [w, b, relu] : spec) {
          layers.push_back({to_matrix(w), to_vector(b), relu});
        }
        return Mlp(std::move(layers));
      },
      py::arg("layers"),
      "Build a network from [(weights, bias, relu_after), ...]");

  m.def(
      "random_mlp",
      [](const std::vector<Eigen::Index>& arch, std::uint64_t seed) {
        return init_mlp(arch, seed);
      },
      py::arg("arch"), py::arg("seed") = 0);

  m.def("load_model", &load_model, py::arg("path"));
  m.def("save_model", &save_model, py::arg("net"), py::arg("path"));

  m.def(
      "forward",
      [](const Mlp& net, const std::vector<double>& x) {
        return from_vector(forward(net, to_vector(x)).output);
      },
      py::arg("net"), py::arg("x"));
  m.def(
      "clarke_jacobian",
      [](const Mlp& net, const std::vector<double>& x) {
        return from_matrix(clarke_jacobian(net, forward(net, to_vector(x))));
      },
      py::arg("net"), py::arg("x"));
  m.def(
      "activation_pattern",
      [](const Mlp& net, const std::vector<double>& x) {
        return activation_pattern(net, to_vector(x));
      },
      py::arg("net"), py::arg("x"));

  m.def(
      "vector_norm",
      [](const std::vector<double>& v, const std::string& tag) {
        return vector_norm(to_vector(v), parse_norm_tag(tag));
      },
      py::arg("v"), py::arg("tag"));
  m.def(
      "dual_norm_tag",
      [](const std::string& tag) { return to_string(dual(parse_norm_tag(tag))); },
      py::arg("tag"));
  m.def(
      "induced_norm",
      [](const Rows& g, const std::string& alpha, const std::string& beta) {
        return induced_norm(to_matrix(g), make_pair(alpha, beta));
      },
      py::arg("matrix"), py::arg("alpha"), py::arg("beta"));
  m.def(
      "sample_value",
      [](const Mlp& net, const std::vector<double>& x, const std::string& alpha,
         const std::string& beta) {
        return sample_value(net, make_pair(alpha, beta), to_vector(x));
      },
      py::arg("net"), py::arg("x"), py::arg("alpha") = "inf",
      py::arg("beta") = "inf");

  m.def(
      "init_subregions",
      [](const Box& box, std::int64_t k) { return init_subregions(box, k); },
      py::arg("box"), py::arg("k"));
  m.def("subdivide", [](const Box& box) { return subdivide(box); },
        py::arg("box"));

  m.def(
      "estimate",
      [](const Mlp& net, const Box& domain, const std::string& algorithm,
         std::int64_t samples, const std::string& alpha, const std::string& beta,
         std::uint64_t seed, std::int64_t k, double c, double tm,
         std::int64_t n0, const std::string& sigma_mode, int threads) {
        const EstimatorConfig config =
            make_config(algorithm, samples, alpha, beta, seed, k, c, tm, n0,
                        sigma_mode, threads);
        return report_to_dict(run_estimate(net, domain, config), config);
      },
      py::arg("net"), py::arg("domain"), py::arg("algorithm") = "uniform",
      py::arg("samples") = 1000, py::arg("alpha") = "inf",
      py::arg("beta") = "inf", py::arg("seed") = 0, py::arg("k") = 2,
      py::arg("c") = 10.0, py::arg("tm") = 2.0, py::arg("n0") = 10,
      py::arg("sigma_mode") = "stddev", py::arg("threads") = 1);

  m.def(
      "grid_oracle",
      [](const Mlp& net, const Box& domain, std::int64_t points_per_dim,
         bool jitter, const std::string& alpha, const std::string& beta,
         int threads) {
        const OracleResult result = grid_oracle(
            net, domain, {points_per_dim, jitter}, make_pair(alpha, beta),
            threads);
        return py::make_tuple(result.value, from_vector(result.argmax));
      },
      py::arg("net"), py::arg("domain"), py::arg("points_per_dim"),
      py::arg("jitter") = false, py::arg("alpha") = "inf",
      py::arg("beta") = "inf", py::arg("threads") = 1);

  m.def(
      "enumerate_breakpoints",
      [](const Mlp& net, const Box& interval) {
        return enumerate_breakpoints(net, interval);
      },
      py::arg("net"), py::arg("interval"));
  m.def(
      "breakpoint_oracle_1d",
      [](const Mlp& net, const Box& interval, const std::string& alpha,
         const std::string& beta) {
        const OracleResult result =
            breakpoint_oracle_1d(net, interval, make_pair(alpha, beta));
        return py::make_tuple(result.value, from_vector(result.argmax));
      },
      py::arg("net"), py::arg("interval"), py::arg("alpha") = "inf",
      py::arg("beta") = "inf");

  m.def(
      "gen_spheres",
      [](Eigen::Index dim, int n_spheres, std::int64_t n_points,
         const Box& domain, std::uint64_t seed) {
        const Dataset data = gen_spheres(dim, n_spheres, n_points, domain, seed);
        Rows xs, ys;
        for (const auto& x : data.inputs) xs.push_back(from_vector(x));
        for (const auto& y : data.targets) ys.push_back(from_vector(y));
        return py::make_tuple(xs, ys);
      },
      py::arg("dim"), py::arg("n_spheres"), py::arg("n_points"),
      py::arg("domain"), py::arg("seed") = 0);

  m.def(
      "train_mlp",
      [](const Mlp& net, const Rows& inputs, const Rows& targets, double lr,
         std::int64_t epochs, std::uint64_t seed) {
        Dataset data;
        for (const auto& x : inputs) data.inputs.push_back(to_vector(x));
        for (const auto& y : targets) data.targets.push_back(to_vector(y));
        TrainConfig config;
        config.learning_rate = lr;
        config.epochs = epochs;
        config.seed = seed;
        TrainResult result = train(net, data, config);
        return py::make_tuple(std::move(result.net), result.loss_history);
      },
      py::arg("net"), py::arg("inputs"), py::arg("targets"),
      py::arg("lr") = 5e-4, py::arg("epochs") = 500, py::arg("seed") = 0);
}
