// SPDX-License-Identifier: Apache-2.0
//
// JSON codecs.
//
//   graph     {"n": int, "edges": [[u,v],...], "node_labels": [int,...] | null}
//             edges are written with u < v in ascending order
//   dataset   {"name": str, "class_count": int, "graphs": [graph,...], "labels": [int,...]}
//   verdict   {"outcome": str, "rounds": int, "certificate": [int,...] | null, ...}
//   matrix    [["num/den", ...], ...]
//   model     {"format": "wlt-checkpoint", "version": 1, "config": {...}, "tensors": {...}}

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "wlt/data.hpp"
#include "wlt/fractional.hpp"
#include "wlt/graph.hpp"
#include "wlt/nn/model.hpp"
#include "wlt/rational.hpp"
#include "wlt/refinement.hpp"

namespace wlt::io {

using nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (auto [u, v] : g.edges()) edges.push_back({u, v});
  json out = {{"n", g.size()}, {"edges", std::move(edges)}};
  out["node_labels"] = g.node_labels() ? json(*g.node_labels()) : json(nullptr);
  return out;
}

inline Graph graph_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw FormatError("edge must be a pair [u, v]");
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    std::optional<std::vector<int>> labels;
    if (j.contains("node_labels") && !j["node_labels"].is_null()) labels = j["node_labels"].get<std::vector<int>>();
    return Graph::from_edges(n, edges, std::move(labels));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed graph JSON: ") + e.what());
  }
}

inline json dataset_to_json(const data::Dataset& ds) {
  json graphs = json::array();
  for (const auto& g : ds.graphs) graphs.push_back(graph_to_json(g));
  return {{"name", ds.name}, {"class_count", ds.class_count}, {"graphs", std::move(graphs)}, {"labels", ds.labels}};
}

inline data::Dataset dataset_from_json(const json& j) {
  try {
    data::Dataset ds;
    ds.name = j.value("name", "");
    ds.class_count = j.at("class_count").get<int>();
    for (const auto& g : j.at("graphs")) ds.graphs.push_back(graph_from_json(g));
    ds.labels = j.at("labels").get<std::vector<int>>();
    data::validate(ds);
    return ds;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed dataset JSON: ") + e.what());
  }
}

inline json matrix_to_json(const RationalMatrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(to_fraction_string(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline RationalMatrix matrix_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(j[0].size());
  RationalMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols) throw FormatError("ragged matrix");
    for (int c = 0; c < cols; ++c) m(r, c) = parse_fraction(j[r][c].get<std::string>());
  }
  return m;
}

inline json permutation_to_json(const std::optional<Permutation>& p) {
  if (!p) return nullptr;
  return json(std::vector<int>(p->mapping().begin(), p->mapping().end()));
}

inline json verdict_to_json(const WlVerdict& v) {
  return {{"outcome", std::string(to_string(v.outcome))}, {"rounds", v.rounds}, {"certificate", nullptr}};
}

inline json verdict_to_json(const TinhoferVerdict& v) {
  json trace = json::array();
  for (const auto& s : v.recolor_trace) {
    trace.push_back({{"round", s.round}, {"class_id", s.class_id}, {"g_node", s.g_node}, {"h_node", s.h_node}});
  }
  return {{"outcome", std::string(to_string(v.outcome))},
          {"rounds", v.rounds},
          {"certificate", permutation_to_json(v.certificate)},
          {"recolor_trace", std::move(trace)}};
}

inline json fractional_to_json(const FractionalIsoResult& r) {
  return {{"feasible", r.feasible}, {"witness", r.witness ? matrix_to_json(*r.witness) : json(nullptr)}};
}

inline json compactness_to_json(const CompactnessReport& r) {
  return {{"status", std::string(to_string(r.status))},
          {"witness", r.witness ? matrix_to_json(*r.witness) : json(nullptr)},
          {"automorphism_count", r.automorphism_count}};
}

// ---------------------------------------------------------------------------
// Model checkpoints

inline json config_to_json(const nn::ModelConfig& c) {
  return {{"layout", c.layout},
          {"input_dim", c.input_dim},
          {"hidden_dim", c.hidden_dim},
          {"class_count", c.class_count},
          {"recolor_fraction", std::string(nn::to_string(c.recolor_fraction))},
          {"epsilon_mode", c.epsilon_mode == nn::EpsilonMode::Fixed0 ? "fixed0" : "trainable"},
          {"bias_init", std::string(nn::to_string(c.bias_init))},
          {"rounding_precision", c.rounding_precision}};
}

inline nn::ModelConfig config_from_json(const json& j) {
  nn::ModelConfig c;
  c.layout = j.at("layout").get<std::string>();
  c.input_dim = j.at("input_dim").get<int>();
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.class_count = j.at("class_count").get<int>();
  c.recolor_fraction = j.at("recolor_fraction").get<std::string>() == "half" ? nn::RecolorFraction::Half
                                                                             : nn::RecolorFraction::SingleNode;
  c.epsilon_mode = j.at("epsilon_mode").get<std::string>() == "trainable" ? nn::EpsilonMode::Trainable
                                                                          : nn::EpsilonMode::Fixed0;
  c.bias_init = j.value("bias_init", std::string("zero")) == "fan-in" ? nn::BiasInit::FanInUniform : nn::BiasInit::Zero;
  c.rounding_precision = j.at("rounding_precision").get<double>();
  return c;
}

inline constexpr int kCheckpointVersion = 1;

inline json checkpoint_to_json(const nn::ModelConfig& cfg, const nn::ModelParams& params) {
  json tensors = json::object();
  nn::for_each_tensor(params, [&](const std::string& name, std::span<const double> s) {
    tensors[name] = std::vector<double>(s.begin(), s.end());
  });
  return {{"format", "wlt-checkpoint"},
          {"version", kCheckpointVersion},
          {"config", config_to_json(cfg)},
          {"tensors", std::move(tensors)}};
}

inline std::pair<nn::ModelConfig, nn::ModelParams> checkpoint_from_json(const json& j) {
  if (j.value("format", "") != "wlt-checkpoint") throw FormatError("not a wlt checkpoint");
  if (j.value("version", 0) != kCheckpointVersion) throw FormatError("unsupported checkpoint version");
  nn::ModelConfig cfg = config_from_json(j.at("config"));
  std::mt19937_64 unused(0);
  nn::ModelParams params = nn::init_params(cfg, unused);
  const json& tensors = j.at("tensors");
  nn::for_each_tensor(params, [&](const std::string& name, std::span<double> s) {
    auto values = tensors.at(name).get<std::vector<double>>();
    if (values.size() != s.size()) throw FormatError("tensor " + name + " has the wrong size");
    std::copy(values.begin(), values.end(), s.begin());
  });
  return {std::move(cfg), std::move(params)};
}

// ---------------------------------------------------------------------------
// Files

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline Graph read_graph_file(const std::filesystem::path& path) { return graph_from_json(read_json_file(path)); }

inline data::Dataset read_dataset_file(const std::filesystem::path& path) {
  return dataset_from_json(read_json_file(path));
}

}  // namespace wlt::io
