#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lipest/data_train.hpp"
#include "lipest/estimators.hpp"
#include "lipest/oracle.hpp"

namespace lipest {

inline constexpr const char* kVersion = "0.1.0";

// 17 significant digits: round-trip exact for 64-bit floats, and stable
// bytes for the reproducibility contract. Non-finite values render as null.
std::string format_double(double v);

std::string json_escape(const std::string& s);

// "[a,b,...]" with format_double entries.
std::string vector_json(const Eigen::VectorXd& v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Model file: {"input_dim": n, "layers": [{"weights": [[...]], "bias": [...],
// "relu_after": bool}, ...]}, weights row-major (one inner array per output
// neuron). The loader reports the offending field on rejection.
Mlp load_model(const std::string& path);
void save_model(const Mlp& net, const std::string& path);

// Dataset: JSON {"inputs": [[...]], "targets": [[...]], "meta": {...}} or,
// for a .csv path, one row per point with the target in the last column.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& data, const std::string& path);

// Domain file: {"low": [...], "high": [...]}.
Box load_domain(const std::string& path);

std::string render_estimate_report(const EstimateReport& report,
                                   const EstimatorConfig& config);

struct OracleReportExtras {
  std::string mode;                  // "grid" | "breakpoints"
  std::int64_t grid = 0;             // grid mode
  bool jitter = false;               // grid mode
  std::int64_t breakpoint_count = 0; // breakpoints mode
};
std::string render_oracle_report(const OracleResult& result,
                                 const NormPair& pair,
                                 const OracleReportExtras& extras);

// CSV "x0,x1,...,norm", row-major over the lattice of points_per_dim^d
// points shared with grid_oracle.
void write_heatmap_csv(const Mlp& net, const Box& domain,
                       std::int64_t points_per_dim, const NormPair& pair,
                       const std::string& path);

// One manifest per CLI run, written next to the primary output. Values of
// `config` entries must be pre-rendered JSON.
struct Manifest {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, std::string>> outputs;
  std::vector<std::pair<std::string, std::string>> config;
};
void save_manifest(const Manifest& manifest, const std::string& path);

}  // namespace lipest
