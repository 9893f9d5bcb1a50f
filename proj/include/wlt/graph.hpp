// SPDX-License-Identifier: Apache-2.0
//
// Core graph types: simple undirected graphs, permutations, and color
// partitions with canonical class ids.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wlt {

using Node = int;
using Edge = std::pair<Node, Node>;

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Immutable simple undirected graph on nodes 0..n-1.
///
/// Neighbor lists are sorted ascending. Node labels are optional categorical
/// values carried through for the feature-construction path; refinement and
/// isomorphism routines ignore them.
class Graph {
 public:
  Graph() = default;

  /// Builds from an edge list. Rejects self-loops, duplicate edges (in either
  /// orientation) and out-of-range endpoints.
  static Graph from_edges(int n, std::span<const Edge> edges,
                          std::optional<std::vector<int>> node_labels = std::nullopt) {
    if (n < 0) throw GraphError("negative node count");
    Graph g;
    g.adjacency_.assign(static_cast<std::size_t>(n), {});
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n) {
        throw GraphError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                         ") out of range for n=" + std::to_string(n));
      }
      if (u == v) throw GraphError("self-loop at node " + std::to_string(u));
      g.adjacency_[u].push_back(v);
      g.adjacency_[v].push_back(u);
    }
    for (std::size_t v = 0; v < g.adjacency_.size(); ++v) {
      auto& nb = g.adjacency_[v];
      std::sort(nb.begin(), nb.end());
      if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
        throw GraphError("duplicate edge at node " + std::to_string(v));
      }
    }
    if (node_labels) {
      if (static_cast<int>(node_labels->size()) != n) {
        throw GraphError("node label count does not match node count");
      }
      g.labels_ = std::move(node_labels);
    }
    return g;
  }

  int size() const { return static_cast<int>(adjacency_.size()); }
  std::span<const Node> neighbors(Node v) const { return adjacency_.at(v); }
  int degree(Node v) const { return static_cast<int>(adjacency_.at(v).size()); }

  bool has_edge(Node u, Node v) const {
    const auto& nb = adjacency_.at(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& nb : adjacency_) twice += nb.size();
    return twice / 2;
  }

  /// Edges with u < v, ascending.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (Node u = 0; u < size(); ++u) {
      for (Node v : adjacency_[u]) {
        if (u < v) out.emplace_back(u, v);
      }
    }
    return out;
  }

  std::vector<int> degree_sequence() const {
    std::vector<int> d(adjacency_.size());
    for (std::size_t v = 0; v < d.size(); ++v) d[v] = static_cast<int>(adjacency_[v].size());
    return d;
  }

  int max_degree() const {
    int best = 0;
    for (const auto& nb : adjacency_) best = std::max(best, static_cast<int>(nb.size()));
    return best;
  }

  const std::optional<std::vector<int>>& node_labels() const { return labels_; }
  bool has_labels() const { return labels_.has_value(); }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::vector<Node>> adjacency_;
  std::optional<std::vector<int>> labels_;
};

inline Graph build_graph(int n, std::span<const Edge> edges) {
  return Graph::from_edges(n, edges);
}

inline Graph build_graph(int n, std::initializer_list<Edge> edges) {
  return Graph::from_edges(n, std::span<const Edge>(edges.begin(), edges.size()));
}

/// Bijection on 0..n-1; `image(v)` is where v is sent.
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<Node> mapping) : mapping_(std::move(mapping)) {
    std::vector<char> seen(mapping_.size(), 0);
    for (Node x : mapping_) {
      if (x < 0 || x >= static_cast<Node>(mapping_.size()) || seen[x]) {
        throw GraphError("mapping is not a permutation");
      }
      seen[x] = 1;
    }
  }

  static Permutation identity(int n) {
    std::vector<Node> m(static_cast<std::size_t>(n));
    std::iota(m.begin(), m.end(), 0);
    return Permutation(std::move(m));
  }

  int size() const { return static_cast<int>(mapping_.size()); }
  Node operator()(Node v) const { return mapping_.at(v); }
  std::span<const Node> mapping() const { return mapping_; }

  Permutation inverse() const {
    std::vector<Node> inv(mapping_.size());
    for (std::size_t v = 0; v < mapping_.size(); ++v) inv[mapping_[v]] = static_cast<Node>(v);
    return Permutation(std::move(inv));
  }

  /// (this ∘ first)(v) = this(first(v)).
  Permutation after(const Permutation& first) const {
    if (first.size() != size()) throw GraphError("permutation size mismatch");
    std::vector<Node> m(mapping_.size());
    for (std::size_t v = 0; v < m.size(); ++v) m[v] = mapping_[first.mapping_[v]];
    return Permutation(std::move(m));
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<Node> mapping_;
};

/// Returns the graph with every node v renamed to p(v).
inline Graph apply_permutation(const Graph& g, const Permutation& p) {
  if (p.size() != g.size()) {
    throw GraphError("permutation length " + std::to_string(p.size()) +
                     " does not match node count " + std::to_string(g.size()));
  }
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (auto [u, v] : g.edges()) edges.emplace_back(p(u), p(v));
  std::optional<std::vector<int>> labels;
  if (g.node_labels()) {
    labels.emplace(g.node_labels()->size());
    for (Node v = 0; v < g.size(); ++v) (*labels)[p(v)] = (*g.node_labels())[v];
  }
  return Graph::from_edges(g.size(), edges, std::move(labels));
}

/// True iff `p` maps edges of g onto edges of h and non-edges onto non-edges.
inline bool is_isomorphism(const Graph& g, const Graph& h, const Permutation& p) {
  if (g.size() != h.size() || p.size() != g.size()) return false;
  if (g.edge_count() != h.edge_count()) return false;
  for (auto [u, v] : g.edges()) {
    if (!h.has_edge(p(u), p(v))) return false;
  }
  return true;
}

/// Places h's nodes after g's. Labels survive only when both sides have them.
inline std::pair<Graph, int> disjoint_union(const Graph& g, const Graph& h) {
  const int offset = g.size();
  std::vector<Edge> edges = g.edges();
  for (auto [u, v] : h.edges()) edges.emplace_back(u + offset, v + offset);
  std::optional<std::vector<int>> labels;
  if (g.node_labels() && h.node_labels()) {
    labels = *g.node_labels();
    labels->insert(labels->end(), h.node_labels()->begin(), h.node_labels()->end());
  }
  return {Graph::from_edges(g.size() + h.size(), edges, std::move(labels)), offset};
}

/// Partition of nodes into color classes with canonical dense ids.
class ColorPartition {
 public:
  ColorPartition() = default;

  /// All nodes in one class.
  static ColorPartition uniform(int n) { return from_class_ids(std::vector<int>(n, 0)); }

  /// Every node in its own class, class id = node id.
  static ColorPartition discrete(int n) {
    std::vector<int> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), 0);
    return from_class_ids(std::move(ids));
  }

  /// Takes class ids as given; they must be dense in 0..k-1 and each used.
  static ColorPartition from_class_ids(std::vector<int> class_of) {
    ColorPartition p;
    int k = 0;
    for (int c : class_of) {
      if (c < 0) throw GraphError("negative class id");
      k = std::max(k, c + 1);
    }
    p.classes_.assign(static_cast<std::size_t>(k), {});
    for (std::size_t v = 0; v < class_of.size(); ++v) p.classes_[class_of[v]].push_back(static_cast<Node>(v));
    for (const auto& cls : p.classes_) {
      if (cls.empty()) throw GraphError("class ids are not dense");
    }
    p.class_of_ = std::move(class_of);
    return p;
  }

  int node_count() const { return static_cast<int>(class_of_.size()); }
  int class_count() const { return static_cast<int>(classes_.size()); }
  int class_of(Node v) const { return class_of_.at(v); }
  std::span<const int> class_ids() const { return class_of_; }
  std::span<const Node> members(int cls) const { return classes_.at(cls); }
  bool is_discrete() const { return class_count() == node_count(); }

  /// Class sizes indexed by class id.
  std::vector<int> histogram() const {
    std::vector<int> h(classes_.size());
    for (std::size_t c = 0; c < classes_.size(); ++c) h[c] = static_cast<int>(classes_[c].size());
    return h;
  }

  friend bool operator==(const ColorPartition&, const ColorPartition&) = default;

 private:
  std::vector<int> class_of_;
  std::vector<std::vector<Node>> classes_;
};

/// Dictionary relabeling: equal keys share a class and class ids follow the
/// ascending order of keys. Works for any totally ordered key type.
template <typename Key>
ColorPartition canonical_partition_encode(std::span<const Key> coloring) {
  std::map<Key, int> dictionary;
  for (const auto& key : coloring) dictionary.emplace(key, 0);
  int next = 0;
  for (auto& [key, id] : dictionary) id = next++;
  std::vector<int> ids;
  ids.reserve(coloring.size());
  for (const auto& key : coloring) ids.push_back(dictionary.at(key));
  return ColorPartition::from_class_ids(std::move(ids));
}

template <typename Key>
ColorPartition canonical_partition_encode(const std::vector<Key>& coloring) {
  return canonical_partition_encode(std::span<const Key>(coloring));
}

// Small named graphs used throughout tests, the CLI and generators.
namespace graphs {

inline Graph empty(int n) { return Graph::from_edges(n, std::span<const Edge>{}); }

inline Graph path(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::from_edges(n, e);
}

inline Graph cycle(int n) {
  if (n < 3) throw GraphError("cycle needs at least 3 nodes");
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, e);
}

inline Graph complete(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph::from_edges(n, e);
}

/// Star with `leaves` leaves; node 0 is the center.
inline Graph star(int leaves) {
  std::vector<Edge> e;
  for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return Graph::from_edges(leaves + 1, e);
}

inline Graph complete_bipartite(int a, int b) {
  std::vector<Edge> e;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) e.emplace_back(i, a + j);
  return Graph::from_edges(a + b, e);
}

/// Two triangles {0,1,2}, {3,4,5} joined by the matching i -- i+3.
inline Graph triangular_prism() {
  return build_graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {0, 3}, {1, 4}, {2, 5}});
}

inline Graph two_cycles(int a, int b) { return disjoint_union(cycle(a), cycle(b)).first; }

}  // namespace graphs

}  // namespace wlt
