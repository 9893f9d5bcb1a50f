// SPDX-License-Identifier: Apache-2.0
//
// Color refinement (1-WL), closures from arbitrary initial colorings, the WL
// pair test and the Tinhofer recoloring test with checked certificates.

#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "wlt/graph.hpp"

namespace wlt {

enum class WlOutcome { NonIsomorphic, PossiblyIsomorphic };
enum class TinhoferOutcome { Isomorphic, PossiblyNonIsomorphic };

inline std::string_view to_string(WlOutcome o) {
  return o == WlOutcome::NonIsomorphic ? "NonIsomorphic" : "PossiblyIsomorphic";
}

inline std::string_view to_string(TinhoferOutcome o) {
  return o == TinhoferOutcome::Isomorphic ? "Isomorphic" : "PossiblyNonIsomorphic";
}

struct WlVerdict {
  WlOutcome outcome = WlOutcome::NonIsomorphic;
  int rounds = 0;
  ColorPartition final_partition;  // over the disjoint union g + h
};

/// One individualization step of the Tinhofer loop. `h_node` is in h's own
/// numbering (not shifted by the union offset).
struct RecolorStep {
  int round = 0;
  int class_id = 0;
  Node g_node = 0;
  Node h_node = 0;

  friend bool operator==(const RecolorStep&, const RecolorStep&) = default;
};

struct TinhoferVerdict {
  TinhoferOutcome outcome = TinhoferOutcome::PossiblyNonIsomorphic;
  int rounds = 0;  // total refinement rounds over all closures
  std::optional<Permutation> certificate;
  std::vector<RecolorStep> recolor_trace;
};

/// One refinement round. The new class of v is keyed by (old class of v,
/// sorted multiset of neighbor classes), so the result always refines `p`
/// and an unchanged partition keeps its class ids.
inline ColorPartition wl_refine_step(const Graph& g, const ColorPartition& p) {
  if (p.node_count() != g.size()) throw GraphError("partition does not cover graph");
  using Signature = std::pair<int, std::vector<int>>;
  std::vector<Signature> signatures(static_cast<std::size_t>(g.size()));
  for (Node v = 0; v < g.size(); ++v) {
    auto& [own, multiset] = signatures[v];
    own = p.class_of(v);
    multiset.reserve(g.neighbors(v).size());
    for (Node u : g.neighbors(v)) multiset.push_back(p.class_of(u));
    std::sort(multiset.begin(), multiset.end());
  }
  return canonical_partition_encode(signatures);
}

/// Refines until the class count stops growing. `rounds` counts every call
/// to wl_refine_step, including the final confirming one.
inline std::pair<ColorPartition, int> wl_closure(const Graph& g, const ColorPartition& init) {
  ColorPartition current = init;
  int rounds = 0;
  while (true) {
    ColorPartition next = wl_refine_step(g, current);
    ++rounds;
    const bool stable = next.class_count() == current.class_count();
    current = std::move(next);
    if (stable) return {std::move(current), rounds};
  }
}

namespace detail {

// Per-side class histograms of a partition of the union [0, offset) + [offset, n).
inline std::pair<std::vector<int>, std::vector<int>> side_histograms(const ColorPartition& p,
                                                                     int offset) {
  std::vector<int> left(static_cast<std::size_t>(p.class_count()), 0);
  std::vector<int> right(left.size(), 0);
  for (Node v = 0; v < p.node_count(); ++v) {
    (v < offset ? left : right)[p.class_of(v)]++;
  }
  return {std::move(left), std::move(right)};
}

inline bool sides_match(const ColorPartition& p, int offset) {
  auto [left, right] = side_histograms(p, offset);
  return left == right;
}

inline std::vector<int> side_ids(const ColorPartition& p, int begin, int count) {
  std::vector<int> ids(static_cast<std::size_t>(count));
  for (int v = 0; v < count; ++v) ids[v] = p.class_of(begin + v);
  return ids;
}

}  // namespace detail

/// 1-WL on a pair. Both graphs are refined inside their disjoint union so
/// colors are shared; color multisets per side are compared after every round
/// (round 0 included).
inline WlVerdict wl_pair_test(const Graph& g, const Graph& h) {
  WlVerdict verdict;
  if (g.size() != h.size()) return verdict;
  auto [joint, offset] = disjoint_union(g, h);
  ColorPartition current = ColorPartition::uniform(joint.size());
  int previous_k = -1;
  while (true) {
    const bool match = detail::sides_match(current, offset);
    const bool stable = current.class_count() == previous_k;
    if (!match || stable) {
      verdict.outcome = match ? WlOutcome::PossiblyIsomorphic : WlOutcome::NonIsomorphic;
      verdict.final_partition = std::move(current);
      return verdict;
    }
    previous_k = current.class_count();
    current = wl_refine_step(joint, current);
    ++verdict.rounds;
  }
}

/// Maps the single g-node of every class to the single h-node of the same
/// class. The caller verifies edge preservation.
inline Permutation extract_certificate(const ColorPartition& pg, const ColorPartition& ph) {
  if (!pg.is_discrete() || !ph.is_discrete()) {
    throw GraphError("certificate extraction needs discrete partitions");
  }
  if (pg.node_count() != ph.node_count()) {
    throw GraphError("certificate extraction needs partitions of equal size");
  }
  std::vector<Node> mapping(static_cast<std::size_t>(pg.node_count()));
  for (Node v = 0; v < pg.node_count(); ++v) mapping[v] = ph.members(pg.class_of(v)).front();
  return Permutation(std::move(mapping));
}

/// Tinhofer's GRAPHIS test. Alternates WL closure with individualizing one
/// node per side from a shared class. The class is the one maximizing
/// (per-side size, class id); within it the smallest node id is taken on each
/// side. An Isomorphic outcome is only reported with a verified certificate.
inline TinhoferVerdict tinhofer_test(const Graph& g, const Graph& h) {
  TinhoferVerdict verdict;
  if (g.size() != h.size()) return verdict;
  auto [joint, offset] = disjoint_union(g, h);
  const int n = g.size();
  ColorPartition colors = ColorPartition::uniform(joint.size());
  for (int recolorings = 0;; ++recolorings) {
    auto [closure, rounds] = wl_closure(joint, colors);
    verdict.rounds += rounds;
    auto [left, right] = detail::side_histograms(closure, offset);
    if (left != right) {
      verdict.outcome = TinhoferOutcome::PossiblyNonIsomorphic;
      return verdict;
    }
    if (closure.class_count() == n) {
      auto pg = ColorPartition::from_class_ids(detail::side_ids(closure, 0, n));
      auto ph = ColorPartition::from_class_ids(detail::side_ids(closure, offset, n));
      Permutation cert = extract_certificate(pg, ph);
      if (is_isomorphism(g, h, cert)) {
        verdict.outcome = TinhoferOutcome::Isomorphic;
        verdict.certificate = std::move(cert);
      } else {
        verdict.outcome = TinhoferOutcome::PossiblyNonIsomorphic;
      }
      return verdict;
    }

    int chosen = -1;
    for (int c = 0; c < closure.class_count(); ++c) {
      if (left[c] > 1 && (chosen < 0 || left[c] >= left[chosen])) chosen = c;
    }
    // k < n with matching sides always leaves a class of size > 1 per side.
    const auto members = closure.members(chosen);
    const Node v = members.front();
    const Node u = *std::find_if(members.begin(), members.end(),
                                 [offset](Node x) { return x >= offset; });
    verdict.recolor_trace.push_back({recolorings, chosen, v, u - offset});

    std::vector<int> ids(closure.class_ids().begin(), closure.class_ids().end());
    const int fresh = closure.class_count();
    ids[v] = fresh;
    ids[u] = fresh;
    colors = ColorPartition::from_class_ids(std::move(ids));
  }
}

}  // namespace wlt
