#include "lipest/io.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lipest {

using nlohmann::json;

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string vector_json(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ",";
    out += format_double(v[i]);
  }
  return out + "]";
}

namespace {

std::string quoted(const std::string& s) { return "\"" + json_escape(s) + "\""; }

std::string matrix_json(const Eigen::MatrixXd& m) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i > 0) out += ",";
    out += vector_json(m.row(i).transpose());
  }
  return out + "]";
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json parse_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(path, e.what());
  }
}

[[noreturn]] void fail_field(const std::string& path, const std::string& field,
                             const std::string& detail) {
  throw IoError(path, field + ": " + detail);
}

double number_at(const json& j, const std::string& path, const std::string& field) {
  if (!j.is_number()) fail_field(path, field, "expected a number");
  return j.get<double>();
}

Eigen::VectorXd vector_at(const json& j, const std::string& path,
                          const std::string& field) {
  if (!j.is_array()) fail_field(path, field, "expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] =
        number_at(j[i], path, field + "[" + std::to_string(i) + "]");
  }
  return v;
}

std::vector<Eigen::VectorXd> vector_list_at(const json& j, const std::string& path,
                                            const std::string& field) {
  if (!j.is_array()) fail_field(path, field, "expected an array of arrays");
  std::vector<Eigen::VectorXd> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(vector_at(j[i], path, field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path, "read failed");
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << content;
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

Mlp load_model(const std::string& path) {
  const json j = parse_file(path);
  if (!j.is_object()) fail_field(path, "$", "expected a JSON object");
  if (!j.contains("input_dim")) fail_field(path, "input_dim", "missing");
  if (!j["input_dim"].is_number_integer() || j["input_dim"].get<std::int64_t>() < 1) {
    fail_field(path, "input_dim", "expected a positive integer");
  }
  if (!j.contains("layers")) fail_field(path, "layers", "missing");
  if (!j["layers"].is_array() || j["layers"].empty()) {
    fail_field(path, "layers", "expected a nonempty array");
  }

  std::vector<AffineLayer> layers;
  for (std::size_t l = 0; l < j["layers"].size(); ++l) {
    const json& jl = j["layers"][l];
    const std::string where = "layers[" + std::to_string(l) + "]";
    if (!jl.is_object()) fail_field(path, where, "expected an object");
    if (!jl.contains("weights")) fail_field(path, where + ".weights", "missing");
    if (!jl.contains("bias")) fail_field(path, where + ".bias", "missing");
    if (!jl.contains("relu_after") || !jl["relu_after"].is_boolean()) {
      fail_field(path, where + ".relu_after", "expected a boolean");
    }

    const std::vector<Eigen::VectorXd> rows =
        vector_list_at(jl["weights"], path, where + ".weights");
    if (rows.empty()) fail_field(path, where + ".weights", "expected >= 1 row");
    AffineLayer layer;
    layer.weights.resize(static_cast<Eigen::Index>(rows.size()), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size()) {
        fail_field(path, where + ".weights[" + std::to_string(r) + "]",
                   "ragged row length");
      }
      layer.weights.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    }
    layer.bias = vector_at(jl["bias"], path, where + ".bias");
    layer.relu_after = jl["relu_after"].get<bool>();
    layers.push_back(std::move(layer));
  }

  if (layers.front().in_dim() != j["input_dim"].get<std::int64_t>()) {
    fail_field(path, "input_dim",
               "does not match layers[0].weights column count");
  }
  try {
    return Mlp(std::move(layers));
  } catch (const InvalidModel& e) {
    throw IoError(path, e.what());
  }
}

void save_model(const Mlp& net, const std::string& path) {
  std::string out = "{\n";
  out += "  \"input_dim\": " + std::to_string(net.input_dim()) + ",\n";
  out += "  \"layers\": [\n";
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const AffineLayer& layer = net.layers()[l];
    out += "    {\"weights\": " + matrix_json(layer.weights);
    out += ", \"bias\": " + vector_json(layer.bias);
    out += ", \"relu_after\": ";
    out += layer.relu_after ? "true" : "false";
    out += l + 1 < net.layers().size() ? "},\n" : "}\n";
  }
  out += "  ]\n}\n";
  write_text_file(path, out);
}

namespace {

Dataset load_dataset_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<double> fields;
    std::istringstream ls(line);
    std::string cell;
    bool bad = false;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        fields.push_back(std::stod(cell, &used));
        while (used < cell.size() &&
               (cell[used] == ' ' || cell[used] == '\r')) {
          ++used;
        }
        if (used != cell.size()) bad = true;
      } catch (const std::exception&) {
        bad = true;
      }
      if (bad) break;
    }
    if (bad) {
      if (line_no == 1) continue;  // header row
      throw IoError(path, "line " + std::to_string(line_no) +
                              ": expected comma-separated numbers");
    }
    if (fields.size() < 2) {
      throw IoError(path, "line " + std::to_string(line_no) +
                              ": need >= 2 columns (features, target)");
    }
    if (!data.inputs.empty() &&
        fields.size() != static_cast<std::size_t>(data.inputs[0].size()) + 1) {
      throw IoError(path, "line " + std::to_string(line_no) +
                              ": inconsistent column count");
    }
    Eigen::VectorXd x(static_cast<Eigen::Index>(fields.size()) - 1);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x[i] = fields[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd y(1);
    y[0] = fields.back();
    data.inputs.push_back(std::move(x));
    data.targets.push_back(std::move(y));
  }
  if (data.inputs.empty()) throw IoError(path, "no data rows");
  return data;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    return load_dataset_csv(path);
  }
  const json j = parse_file(path);
  if (!j.is_object()) fail_field(path, "$", "expected a JSON object");
  if (!j.contains("inputs")) fail_field(path, "inputs", "missing");
  if (!j.contains("targets")) fail_field(path, "targets", "missing");

  Dataset data;
  data.inputs = vector_list_at(j["inputs"], path, "inputs");
  data.targets = vector_list_at(j["targets"], path, "targets");
  if (data.inputs.size() != data.targets.size()) {
    fail_field(path, "targets", "length does not match inputs");
  }
  if (data.inputs.empty()) fail_field(path, "inputs", "expected >= 1 point");
  if (j.contains("meta") && j["meta"].is_object()) {
    const json& m = j["meta"];
    if (m.contains("seed") && m["seed"].is_number_unsigned()) {
      data.meta.seed = m["seed"].get<std::uint64_t>();
    }
    if (m.contains("centers")) {
      data.meta.centers = vector_list_at(m["centers"], path, "meta.centers");
    }
    if (m.contains("radii")) {
      const Eigen::VectorXd r = vector_at(m["radii"], path, "meta.radii");
      data.meta.radii.assign(r.data(), r.data() + r.size());
    }
    if (m.contains("noise_std")) {
      data.meta.noise_std = number_at(m["noise_std"], path, "meta.noise_std");
    }
  }
  return data;
}

void save_dataset(const Dataset& data, const std::string& path) {
  std::string out = "{\n  \"inputs\": [";
  for (std::size_t i = 0; i < data.inputs.size(); ++i) {
    out += i > 0 ? "," : "";
    out += vector_json(data.inputs[i]);
  }
  out += "],\n  \"targets\": [";
  for (std::size_t i = 0; i < data.targets.size(); ++i) {
    out += i > 0 ? "," : "";
    out += vector_json(data.targets[i]);
  }
  out += "],\n  \"meta\": {\"seed\": " + std::to_string(data.meta.seed);
  out += ", \"centers\": [";
  for (std::size_t i = 0; i < data.meta.centers.size(); ++i) {
    out += i > 0 ? "," : "";
    out += vector_json(data.meta.centers[i]);
  }
  out += "], \"radii\": [";
  for (std::size_t i = 0; i < data.meta.radii.size(); ++i) {
    out += i > 0 ? "," : "";
    out += format_double(data.meta.radii[i]);
  }
  out += "], \"noise_std\": " + format_double(data.meta.noise_std);
  out += "}\n}\n";
  write_text_file(path, out);
}

Box load_domain(const std::string& path) {
  const json j = parse_file(path);
  if (!j.is_object()) fail_field(path, "$", "expected a JSON object");
  if (!j.contains("low")) fail_field(path, "low", "missing");
  if (!j.contains("high")) fail_field(path, "high", "missing");
  try {
    return Box(vector_at(j["low"], path, "low"),
               vector_at(j["high"], path, "high"));
  } catch (const Error& e) {
    throw IoError(path, e.what());
  }
}

std::string render_estimate_report(const EstimateReport& report,
                                   const EstimatorConfig& config) {
  std::string out = "{\n";
  out += "  \"estimate\": " + format_double(report.estimate) + ",\n";
  out += "  \"argmax\": " + vector_json(report.argmax_x) + ",\n";
  out += "  \"samples_used\": " + std::to_string(report.samples_used) + ",\n";
  out += "  \"wall_time_s\": " + format_double(report.wall_time_s) + ",\n";
  out += "  \"algorithm\": " + quoted(to_string(config.algorithm)) + ",\n";
  out += "  \"norm_pair\": [" + quoted(to_string(config.pair.alpha)) + "," +
         quoted(to_string(config.pair.beta)) + "],\n";
  out += "  \"seed\": " + std::to_string(config.seed) + ",\n";
  out += "  \"regions\": [\n";
  for (std::size_t r = 0; r < report.regions.size(); ++r) {
    const RegionReport& region = report.regions[r];
    out += "    {\"low\": " + vector_json(region.box.low);
    out += ", \"high\": " + vector_json(region.box.high);
    out += ", \"n\": " + std::to_string(region.stats.n);
    out += ", \"max\": ";
    out += region.stats.n > 0 ? format_double(region.stats.max) : "null";
    out += r + 1 < report.regions.size() ? "},\n" : "}\n";
  }
  out += "  ],\n";
  out += "  \"trace\": [";
  for (std::size_t i = 0; i < report.trace.size(); ++i) {
    if (i > 0) out += ",";
    out += "[" + std::to_string(report.trace[i].first) + "," +
           format_double(report.trace[i].second) + "]";
  }
  out += "]\n}\n";
  return out;
}

std::string render_oracle_report(const OracleResult& result,
                                 const NormPair& pair,
                                 const OracleReportExtras& extras) {
  std::string out = "{\n";
  out += "  \"mode\": " + quoted(extras.mode) + ",\n";
  out += "  \"value\": " + format_double(result.value) + ",\n";
  out += "  \"argmax\": " + vector_json(result.argmax) + ",\n";
  out += "  \"norm_pair\": [" + quoted(to_string(pair.alpha)) + "," +
         quoted(to_string(pair.beta)) + "]";
  if (extras.mode == "grid") {
    out += ",\n  \"grid\": " + std::to_string(extras.grid);
    out += ",\n  \"jitter\": ";
    out += extras.jitter ? "true" : "false";
  } else {
    out += ",\n  \"breakpoints\": " + std::to_string(extras.breakpoint_count);
  }
  out += "\n}\n";
  return out;
}

void write_heatmap_csv(const Mlp& net, const Box& domain,
                       std::int64_t points_per_dim, const NormPair& pair,
                       const std::string& path) {
  if (net.input_dim() != 2 || domain.dim() != 2) {
    throw DimensionMismatch("heatmap requires a 2-D input model and domain");
  }
  if (points_per_dim < 2) {
    throw ConfigError("heatmap grid needs at least 2 points per dimension");
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << "x0,x1,norm\n";
  Eigen::VectorXd x(2);
  for (std::int64_t i = 0; i < points_per_dim; ++i) {
    x[0] = lattice_coordinate(domain, 0, i, points_per_dim);
    for (std::int64_t j = 0; j < points_per_dim; ++j) {
      x[1] = lattice_coordinate(domain, 1, j, points_per_dim);
      out << format_double(x[0]) << ',' << format_double(x[1]) << ','
          << format_double(sample_value(net, pair, x)) << '\n';
    }
  }
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

void save_manifest(const Manifest& manifest, const std::string& path) {
  std::string out = "{\n";
  out += "  \"command\": " + quoted(manifest.command) + ",\n";
  out += "  \"version\": " + quoted(kVersion) + ",\n";
  out += "  \"timestamp\": " + quoted(utc_timestamp()) + ",\n";
  out += "  \"seed\": " + std::to_string(manifest.seed) + ",\n";
  out += "  \"inputs\": {";
  for (std::size_t i = 0; i < manifest.inputs.size(); ++i) {
    if (i > 0) out += ", ";
    out += quoted(manifest.inputs[i].first) + ": " +
           quoted(manifest.inputs[i].second);
  }
  out += "},\n  \"outputs\": {";
  for (std::size_t i = 0; i < manifest.outputs.size(); ++i) {
    if (i > 0) out += ", ";
    out += quoted(manifest.outputs[i].first) + ": " +
           quoted(manifest.outputs[i].second);
  }
  out += "},\n  \"config\": {";
  for (std::size_t i = 0; i < manifest.config.size(); ++i) {
    if (i > 0) out += ", ";
    out += quoted(manifest.config[i].first) + ": " + manifest.config[i].second;
  }
  out += "}\n}\n";
  write_text_file(path, out);
}

}  // namespace lipest
