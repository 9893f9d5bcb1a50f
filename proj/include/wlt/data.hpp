// SPDX-License-Identifier: Apache-2.0
//
// Graph classification datasets: the TU text format, initial one-hot
// features, k-fold plans, and synthetic WL-hard benchmark families.

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wlt/fractional.hpp"
#include "wlt/graph.hpp"
#include "wlt/nn/matrix.hpp"
#include "wlt/nn/model.hpp"

namespace wlt::data {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  std::vector<int> labels;  // dense, 0..class_count-1
  int class_count = 0;

  std::size_t size() const { return graphs.size(); }
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

inline void validate(const Dataset& ds) {
  if (ds.graphs.size() != ds.labels.size()) throw DataError("graph and label counts differ");
  for (int y : ds.labels) {
    if (y < 0 || y >= ds.class_count) throw DataError("label " + std::to_string(y) + " out of range");
  }
}

// ---------------------------------------------------------------------------
// TU format

namespace detail {

// Integers separated by commas and/or whitespace.
inline std::vector<long long> parse_int_line(std::string_view line, const std::string& file,
                                             int line_no) {
  std::vector<long long> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    long long value = 0;
    const char* first = line.data() + i;
    const char* last = line.data() + j;
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
      throw DataError(file + ":" + std::to_string(line_no) + ": not an integer: '" +
                      std::string(line.substr(i, j - i)) + "'");
    }
    out.push_back(value);
    i = j;
  }
  return out;
}

struct NumberedLine {
  int line_no;
  std::vector<long long> values;
};

// Non-empty lines with their 1-based line numbers.
inline std::vector<NumberedLine> read_int_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<NumberedLine> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto values = parse_int_line(line, path.filename().string(), line_no);
    if (!values.empty()) out.push_back({line_no, std::move(values)});
  }
  return out;
}

inline long long single_value(const NumberedLine& l, const std::string& file) {
  if (l.values.size() != 1) {
    throw DataError(file + ":" + std::to_string(l.line_no) + ": expected one integer");
  }
  return l.values.front();
}

}  // namespace detail

/// Reads NAME_A.txt, NAME_graph_indicator.txt, NAME_graph_labels.txt and,
/// if present, NAME_node_labels.txt from `directory`. Edges listed in both
/// orientations are merged; self-loops are dropped since graphs are simple.
inline Dataset parse_tu_dataset(const std::filesystem::path& directory, const std::string& name) {
  auto file = [&](std::string_view suffix) { return directory / (name + std::string(suffix)); };
  const std::string a_name = name + "_A.txt";
  const std::string gi_name = name + "_graph_indicator.txt";
  const std::string gl_name = name + "_graph_labels.txt";
  const std::string nl_name = name + "_node_labels.txt";
  for (const auto& required : {a_name, gi_name, gl_name}) {
    if (!std::filesystem::exists(directory / required)) {
      throw DataError("missing required file " + (directory / required).string());
    }
  }

  // Node i (1-based) belongs to graph indicator[i-1] (1-based).
  std::vector<int> graph_of;
  for (const auto& l : detail::read_int_file(file("_graph_indicator.txt"))) {
    const long long gid = detail::single_value(l, gi_name);
    if (gid < 1) throw DataError(gi_name + ":" + std::to_string(l.line_no) + ": graph id must be >= 1");
    if (!graph_of.empty() && gid < graph_of.back()) {
      throw DataError(gi_name + ":" + std::to_string(l.line_no) + ": graph ids must be non-decreasing");
    }
    graph_of.push_back(static_cast<int>(gid - 1));
  }
  std::vector<long long> raw_labels;
  for (const auto& l : detail::read_int_file(file("_graph_labels.txt"))) {
    raw_labels.push_back(detail::single_value(l, gl_name));
  }
  const int graph_count = static_cast<int>(raw_labels.size());
  if (!graph_of.empty() && graph_of.back() >= graph_count) {
    throw DataError(gi_name + ": references graph " + std::to_string(graph_of.back() + 1) +
                    " but only " + std::to_string(graph_count) + " graph labels exist");
  }

  // First node and size of each graph.
  std::vector<int> first_node(static_cast<std::size_t>(graph_count), -1), node_count(graph_count, 0);
  for (int v = 0; v < static_cast<int>(graph_of.size()); ++v) {
    if (first_node[graph_of[v]] < 0) first_node[graph_of[v]] = v;
    node_count[graph_of[v]]++;
  }

  std::vector<std::set<Edge>> edges(static_cast<std::size_t>(graph_count));
  for (const auto& l : detail::read_int_file(file("_A.txt"))) {
    const std::string where = a_name + ":" + std::to_string(l.line_no);
    if (l.values.size() != 2) throw DataError(where + ": expected two node ids");
    const long long u = l.values[0] - 1, v = l.values[1] - 1;
    const long long total = static_cast<long long>(graph_of.size());
    if (u < 0 || v < 0 || u >= total || v >= total) throw DataError(where + ": node id out of range");
    if (graph_of[u] != graph_of[v]) throw DataError(where + ": edge connects nodes of different graphs");
    if (u == v) continue;
    const int gid = graph_of[u];
    const int a = static_cast<int>(u) - first_node[gid], b = static_cast<int>(v) - first_node[gid];
    edges[gid].insert({std::min(a, b), std::max(a, b)});
  }

  std::optional<std::vector<long long>> node_labels;
  if (std::filesystem::exists(file("_node_labels.txt"))) {
    node_labels.emplace();
    for (const auto& l : detail::read_int_file(file("_node_labels.txt"))) {
      // Some releases list several label columns; the first one is the label.
      node_labels->push_back(l.values.front());
    }
    if (node_labels->size() != graph_of.size()) {
      throw DataError(nl_name + ": " + std::to_string(node_labels->size()) + " labels for " +
                      std::to_string(graph_of.size()) + " nodes");
    }
  }

  std::map<long long, int> dense;
  for (long long y : raw_labels) dense.emplace(y, 0);
  int next = 0;
  for (auto& [y, id] : dense) id = next++;

  Dataset ds;
  ds.name = name;
  ds.class_count = static_cast<int>(dense.size());
  for (int gid = 0; gid < graph_count; ++gid) {
    std::vector<Edge> e(edges[gid].begin(), edges[gid].end());
    std::optional<std::vector<int>> labels;
    if (node_labels) {
      labels.emplace();
      for (int i = 0; i < node_count[gid]; ++i) labels->push_back(static_cast<int>((*node_labels)[first_node[gid] + i]));
    }
    ds.graphs.push_back(Graph::from_edges(node_count[gid], e, std::move(labels)));
    ds.labels.push_back(dense.at(raw_labels[gid]));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Initial features

enum class FeaturePolicy { NodeLabelOneHot, DegreeOneHot };

/// One-hot encoder fixed over a whole dataset: node labels when every graph
/// carries them, node degrees 0..max_degree otherwise.
struct FeatureEncoder {
  FeaturePolicy policy = FeaturePolicy::DegreeOneHot;
  int max_degree = 0;
  std::vector<int> label_alphabet;  // sorted

  static FeatureEncoder degrees(int max_degree) { return {FeaturePolicy::DegreeOneHot, max_degree, {}}; }

  static FeatureEncoder labels(std::vector<int> alphabet) {
    std::sort(alphabet.begin(), alphabet.end());
    alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
    return {FeaturePolicy::NodeLabelOneHot, 0, std::move(alphabet)};
  }

  static FeatureEncoder for_dataset(const Dataset& ds) {
    const bool all_labeled = !ds.graphs.empty() &&
        std::all_of(ds.graphs.begin(), ds.graphs.end(), [](const Graph& g) { return g.has_labels(); });
    if (all_labeled) {
      std::vector<int> alphabet;
      for (const auto& g : ds.graphs) alphabet.insert(alphabet.end(), g.node_labels()->begin(), g.node_labels()->end());
      return labels(std::move(alphabet));
    }
    int max_degree = 0;
    for (const auto& g : ds.graphs) max_degree = std::max(max_degree, g.max_degree());
    return degrees(max_degree);
  }

  int dim() const {
    return policy == FeaturePolicy::DegreeOneHot ? max_degree + 1 : static_cast<int>(label_alphabet.size());
  }
};

inline nn::FeatureMatrix initial_features(const Graph& g, const FeatureEncoder& enc) {
  nn::FeatureMatrix x(g.size(), enc.dim());
  for (Node v = 0; v < g.size(); ++v) {
    int index = 0;
    if (enc.policy == FeaturePolicy::DegreeOneHot) {
      index = g.degree(v);
      if (index > enc.max_degree) {
        throw DataError("degree " + std::to_string(index) + " exceeds encoder maximum " + std::to_string(enc.max_degree));
      }
    } else {
      if (!g.has_labels()) throw DataError("graph has no node labels");
      const int label = (*g.node_labels())[v];
      auto it = std::lower_bound(enc.label_alphabet.begin(), enc.label_alphabet.end(), label);
      if (it == enc.label_alphabet.end() || *it != label) {
        throw DataError("node label " + std::to_string(label) + " not in alphabet");
      }
      index = static_cast<int>(it - enc.label_alphabet.begin());
    }
    x(v, index) = 1.0;
  }
  return x;
}

inline std::vector<nn::LabeledGraph> make_samples(const Dataset& ds, const FeatureEncoder& enc) {
  validate(ds);
  std::vector<nn::LabeledGraph> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out.push_back({ds.graphs[i], initial_features(ds.graphs[i], enc), ds.labels[i]});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Folds

struct FoldPlan {
  std::vector<std::vector<std::size_t>> folds;
};

/// Seeded shuffle, then contiguous chunks; the first n % k folds get one
/// extra element.
inline FoldPlan kfold_splits(std::size_t n, int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("more folds than samples");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  FoldPlan plan;
  const std::size_t base = n / k, extra = n % k;
  std::size_t pos = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    plan.folds.emplace_back(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Synthetic WL-hard families

enum class Family { CyclePair, K33Prism, RandomRegular };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::CyclePair: return "CyclePair";
    case Family::K33Prism: return "K33Prism";
    case Family::RandomRegular: return "RandomRegular";
  }
  return "?";
}

inline Family parse_family(std::string_view s) {
  if (s == "CyclePair") return Family::CyclePair;
  if (s == "K33Prism") return Family::K33Prism;
  if (s == "RandomRegular") return Family::RandomRegular;
  throw std::invalid_argument("unknown family '" + std::string(s) + "'");
}

struct FamilyParams {
  int m = 3;        // CyclePair: C_{2m} vs C_m + C_m
  int n = 8;        // RandomRegular order
  int degree = 3;   // RandomRegular degree
  int retry_budget = 1000;
};

inline Permutation random_permutation(int n, std::mt19937_64& rng) {
  std::vector<Node> m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 0);
  std::shuffle(m.begin(), m.end(), rng);
  return Permutation(std::move(m));
}

/// Pairing model: shuffle n*d half-edge stubs and pair them up, rejecting
/// self-loops and multi-edges. nullopt after `retries` failed attempts.
inline std::optional<Graph> random_regular_graph(int n, int d, std::mt19937_64& rng, int retries) {
  if (n < 1 || d < 0 || d >= n || (n * d) % 2 != 0) {
    throw std::invalid_argument("no simple " + std::to_string(d) + "-regular graph on " + std::to_string(n) + " nodes");
  }
  std::vector<Node> stubs;
  for (Node v = 0; v < n; ++v) stubs.insert(stubs.end(), static_cast<std::size_t>(d), v);
  for (int attempt = 0; attempt < retries; ++attempt) {
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::set<Edge> edges;
    bool ok = true;
    for (std::size_t i = 0; i < stubs.size() && ok; i += 2) {
      const Node u = std::min(stubs[i], stubs[i + 1]), v = std::max(stubs[i], stubs[i + 1]);
      ok = u != v && edges.insert({u, v}).second;
    }
    if (ok) return Graph::from_edges(n, std::vector<Edge>(edges.begin(), edges.end()));
  }
  return std::nullopt;
}

/// `count` samples alternating class 0 / class 1, each a random relabeling of
/// its class representative:
///   CyclePair      C_{2m} / C_m + C_m
///   K33Prism       K_{3,3} / triangular prism
///   RandomRegular  two d-regular graphs of order n, non-isomorphism
///                  certified by the exhaustive oracle
inline Dataset gen_wl_hard_pairs(Family family, const FamilyParams& params, int count, std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("negative sample count");
  std::mt19937_64 rng(seed);
  Graph class0, class1;
  switch (family) {
    case Family::CyclePair:
      if (params.m < 3) throw std::invalid_argument("CyclePair needs m >= 3");
      class0 = graphs::cycle(2 * params.m);
      class1 = graphs::two_cycles(params.m, params.m);
      break;
    case Family::K33Prism:
      class0 = graphs::complete_bipartite(3, 3);
      class1 = graphs::triangular_prism();
      break;
    case Family::RandomRegular: {
      auto first = random_regular_graph(params.n, params.degree, rng, params.retry_budget);
      if (!first) throw DataError("RandomRegular: pairing model failed within retry budget");
      std::optional<Graph> second;
      for (int attempt = 0; attempt < params.retry_budget && !second; ++attempt) {
        auto candidate = random_regular_graph(params.n, params.degree, rng, params.retry_budget);
        if (candidate && !brute_force_isomorphic(*first, *candidate)) second = std::move(candidate);
      }
      if (!second) throw DataError("RandomRegular: no non-isomorphic partner within retry budget");
      class0 = std::move(*first);
      class1 = std::move(*second);
      break;
    }
  }
  Dataset ds;
  ds.name = std::string(to_string(family));
  ds.class_count = 2;
  for (int i = 0; i < count; ++i) {
    const Graph& base = i % 2 == 0 ? class0 : class1;
    ds.graphs.push_back(apply_permutation(base, random_permutation(base.size(), rng)));
    ds.labels.push_back(i % 2);
  }
  return ds;
}

}  // namespace wlt::data
