// SPDX-License-Identifier: Apache-2.0
//
// Fractional isomorphism, the commuting doubly stochastic polytope S(A),
// compactness and the exhaustive isomorphism/automorphism oracles. All
// polytope work is done in exact rational arithmetic.

#pragma once

#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wlt/graph.hpp"
#include "wlt/rational.hpp"
#include "wlt/simplex.hpp"

namespace wlt {

/// Raised when an exhaustive routine is asked to run above its size limit.
class TooLarge : public std::runtime_error {
 public:
  TooLarge(std::string_view what, int n, int limit)
      : std::runtime_error(std::string(what) + ": n=" + std::to_string(n) +
                           " exceeds limit " + std::to_string(limit)),
        n_(n),
        limit_(limit) {}
  int n() const { return n_; }
  int limit() const { return limit_; }

 private:
  int n_;
  int limit_;
};

struct SizeLimits {
  int lp = 12;
  int compact = 5;
  int oracle = 8;
};

inline RationalMatrix adjacency_matrix(const Graph& g) {
  RationalMatrix a(g.size(), g.size());
  for (auto [u, v] : g.edges()) {
    a(u, v) = 1;
    a(v, u) = 1;
  }
  return a;
}

inline RationalMatrix permutation_matrix(const Permutation& p) {
  RationalMatrix m(p.size(), p.size());
  for (Node v = 0; v < p.size(); ++v) m(p(v), v) = 1;
  return m;
}

/// X doubly stochastic and XA = BX, checked exactly.
inline bool satisfies_fractional_system(const Graph& g, const Graph& h, const RationalMatrix& x) {
  if (g.size() != h.size() || x.rows() != g.size() || x.cols() != g.size()) return false;
  if (!x.is_doubly_stochastic()) return false;
  return x * adjacency_matrix(g) == adjacency_matrix(h) * x;
}

namespace detail {

// Equality system over vec(X) (x_ij at i*n+j): XA - BX = 0, Xe = e, X^t e = e.
inline std::pair<RationalMatrix, std::vector<Rational>> fractional_system(const Graph& g,
                                                                          const Graph& h) {
  const int n = g.size();
  const int vars = n * n;
  RationalMatrix a(vars + 2 * n, vars);
  std::vector<Rational> b(static_cast<std::size_t>(vars + 2 * n));
  auto var = [n](int i, int j) { return i * n + j; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int row = var(i, j);
      // (XA)_ij = sum_k x_ik A_kj
      for (Node k : g.neighbors(j)) a(row, var(i, k)) += 1;
      // (BX)_ij = sum_k B_ik x_kj
      for (Node k : h.neighbors(i)) a(row, var(k, j)) -= 1;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a(vars + i, var(i, j)) = 1;
      a(vars + n + i, var(j, i)) = 1;
    }
    b[vars + i] = 1;
    b[vars + n + i] = 1;
  }
  return {std::move(a), std::move(b)};
}

inline RationalMatrix unvec(const std::vector<Rational>& x, int n) {
  RationalMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = x[static_cast<std::size_t>(i) * n + j];
  return m;
}

}  // namespace detail

struct FractionalIsoResult {
  bool feasible = false;
  std::optional<RationalMatrix> witness;
};

/// Decides whether XA = BX, Xe = X^t e = e, X >= 0 has a solution.
inline FractionalIsoResult lp_feasible_fractional_iso(const Graph& g, const Graph& h,
                                                      int limit = SizeLimits{}.lp) {
  if (g.size() != h.size()) return {};
  if (g.size() > limit) throw TooLarge("fractional isomorphism LP", g.size(), limit);
  if (g.size() == 0) return {true, RationalMatrix(0, 0)};
  auto [a, b] = detail::fractional_system(g, h);
  auto tableau = FeasibleTableau::phase_one(a, std::move(b));
  if (!tableau) return {};
  RationalMatrix x = detail::unvec(tableau->solution(), g.size());
  if (!satisfies_fractional_system(g, h, x)) {
    throw std::logic_error("simplex returned a point outside the fractional system");
  }
  return {true, std::move(x)};
}

namespace detail {

// Backtracking over partial maps g-node -> h-node, in g-node order, keeping
// degrees equal and adjacency consistent with everything assigned so far.
// `visit` returns false to stop the search.
inline void enumerate_isomorphisms(const Graph& g, const Graph& h,
                                   const std::function<bool(const Permutation&)>& visit) {
  const int n = g.size();
  if (n != h.size() || g.edge_count() != h.edge_count()) return;
  {
    auto dg = g.degree_sequence();
    auto dh = h.degree_sequence();
    std::sort(dg.begin(), dg.end());
    std::sort(dh.begin(), dh.end());
    if (dg != dh) return;
  }
  std::vector<Node> image(static_cast<std::size_t>(n), -1);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  bool stop = false;
  std::function<void(Node)> extend = [&](Node v) {
    if (stop) return;
    if (v == n) {
      if (!visit(Permutation(image))) stop = true;
      return;
    }
    for (Node w = 0; w < n && !stop; ++w) {
      if (used[w] || g.degree(v) != h.degree(w)) continue;
      bool ok = true;
      for (Node u = 0; u < v && ok; ++u) ok = g.has_edge(u, v) == h.has_edge(image[u], w);
      if (!ok) continue;
      image[v] = w;
      used[w] = 1;
      extend(v + 1);
      used[w] = 0;
      image[v] = -1;
    }
  };
  extend(0);
}

}  // namespace detail

/// Exhaustive isomorphism search; the returned map is the lexicographically
/// smallest one and has been checked edge by edge.
inline std::optional<Permutation> brute_force_isomorphic(const Graph& g, const Graph& h,
                                                         int limit = SizeLimits{}.oracle) {
  if (g.size() != h.size()) return std::nullopt;
  if (g.size() > limit) throw TooLarge("isomorphism oracle", g.size(), limit);
  std::optional<Permutation> found;
  detail::enumerate_isomorphisms(g, h, [&](const Permutation& p) {
    found = p;
    return false;
  });
  if (found && !is_isomorphism(g, h, *found)) throw std::logic_error("oracle produced a bad map");
  return found;
}

/// All automorphisms in lexicographic order; identity first.
inline std::vector<Permutation> automorphisms(const Graph& g, int limit = SizeLimits{}.oracle) {
  if (g.size() > limit) throw TooLarge("automorphism enumeration", g.size(), limit);
  std::vector<Permutation> out;
  detail::enumerate_isomorphisms(g, g, [&](const Permutation& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

/// Visits each distinct vertex of S(A) = {X doubly stochastic, XA = AX}
/// once, stopping early when `visit` returns false.
///
/// The system is highly degenerate (a permutation vertex has n nonzeros but
/// about 2n basic variables), so plain basis enumeration explodes. The
/// right-hand side is perturbed lexicographically instead: the perturbed
/// polytope is simple, its vertex graph is connected, and every original
/// vertex is the image of at least one perturbed vertex. Depth-first search
/// over that graph, undoing pivots exactly on backtrack.
inline void for_each_SA_vertex(const Graph& g, int n_limit,
                               const std::function<bool(const RationalMatrix&)>& visit) {
  const int n = g.size();
  if (n > n_limit) throw TooLarge("S(A) vertex enumeration", n, n_limit);
  if (n == 0) {
    visit(RationalMatrix(0, 0));
    return;
  }
  auto [a, b] = detail::fractional_system(g, g);
  auto start = FeasibleTableau::phase_one(a, std::move(b));
  if (!start) throw std::logic_error("S(A) is empty, but the identity is always in it");
  FeasibleTableau t = std::move(*start);
  t.add_lexicographic_perturbation();

  using Move = std::pair<int, int>;  // (row, entering column)
  auto moves_from = [](const FeasibleTableau& tab) {
    std::vector<Move> moves;
    for (int c = 0; c < tab.vars(); ++c) {
      if (tab.is_basic(c)) continue;
      const int r = tab.lex_leaving_row(c);
      if (r >= 0) moves.emplace_back(r, c);
    }
    return moves;
  };
  auto basis_key = [](const FeasibleTableau& tab) {
    std::vector<int> key(tab.basis().begin(), tab.basis().end());
    std::sort(key.begin(), key.end());
    return key;
  };

  std::set<std::vector<int>> seen_bases{basis_key(t)};
  std::set<std::vector<Rational>> seen_vertices;
  auto record = [&](const FeasibleTableau& tab) {
    auto x = tab.solution();
    if (!seen_vertices.insert(x).second) return true;
    return visit(detail::unvec(x, n));
  };
  if (!record(t)) return;

  struct Frame {
    std::vector<Move> moves;
    std::size_t next = 0;
    std::optional<Move> undo;
  };
  std::vector<Frame> stack;
  stack.push_back({moves_from(t), 0, std::nullopt});
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == top.moves.size()) {
      if (top.undo) t.pivot(top.undo->first, top.undo->second);
      stack.pop_back();
      continue;
    }
    const auto [row, col] = top.moves[top.next++];
    const int leaving = t.basis()[row];
    t.pivot(row, col);
    if (!seen_bases.insert(basis_key(t)).second) {
      t.pivot(row, leaving);
      continue;
    }
    if (!record(t)) return;
    stack.push_back({moves_from(t), 0, Move{row, leaving}});
  }
}

/// All vertices of S(A), sorted.
inline std::vector<RationalMatrix> polytope_vertices_SA(const Graph& g,
                                                        int n_limit = SizeLimits{}.compact) {
  std::vector<RationalMatrix> out;
  for_each_SA_vertex(g, n_limit, [&](const RationalMatrix& x) {
    out.push_back(x);
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

// Exact rank of the listed columns of `a`, by Gaussian elimination.
inline int column_rank(const RationalMatrix& a, const std::vector<int>& cols) {
  const int rows = a.rows();
  const int k = static_cast<int>(cols.size());
  std::vector<std::vector<Rational>> m(static_cast<std::size_t>(rows), std::vector<Rational>(cols.size()));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < k; ++c) m[r][c] = a(r, cols[c]);
  int rank = 0;
  for (int c = 0; c < k && rank < rows; ++c) {
    int pivot = rank;
    while (pivot < rows && m[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[rank]);
    for (int r = rank + 1; r < rows; ++r) {
      if (m[r][c] == 0) continue;
      const Rational f = m[r][c] / m[rank][c];
      for (int j = c; j < k; ++j) m[r][j] -= f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

}  // namespace detail

/// X is an extreme point of S(A): it lies in S(A) and the constraint columns
/// on its support are linearly independent.
inline bool is_vertex_of_SA(const Graph& g, const RationalMatrix& x) {
  if (!satisfies_fractional_system(g, g, x)) return false;
  const int n = g.size();
  std::vector<int> support;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (x(i, j) != 0) support.push_back(i * n + j);
  auto [a, b] = detail::fractional_system(g, g);
  return detail::column_rank(a, support) == static_cast<int>(support.size());
}

enum class Compactness { Compact, NotCompact, TooLarge };

inline std::string_view to_string(Compactness c) {
  switch (c) {
    case Compactness::Compact: return "Compact";
    case Compactness::NotCompact: return "NotCompact";
    case Compactness::TooLarge: return "TooLarge";
  }
  return "?";
}

struct CompactnessReport {
  Compactness status = Compactness::TooLarge;
  std::optional<RationalMatrix> witness;  // fractional vertex of S(A)
  std::size_t automorphism_count = 0;
};

/// S(A) = conv(Aut(A)) iff every vertex of S(A) is a permutation matrix; a
/// permutation matrix in S(A) commutes with A and is thus an automorphism.
/// Stops at the first fractional vertex.
inline CompactnessReport is_compact(const Graph& g, int n_limit = SizeLimits{}.compact,
                                    int oracle_limit = SizeLimits{}.oracle) {
  CompactnessReport report;
  if (g.size() <= oracle_limit) report.automorphism_count = automorphisms(g, oracle_limit).size();
  if (g.size() > n_limit) return report;
  report.status = Compactness::Compact;
  for_each_SA_vertex(g, n_limit, [&](const RationalMatrix& x) {
    if (x.is_permutation_matrix()) return true;
    report.status = Compactness::NotCompact;
    report.witness = x;
    return false;
  });
  if (report.witness && !is_vertex_of_SA(g, *report.witness)) {
    throw std::logic_error("fractional witness is not a vertex of S(A)");
  }
  return report;
}

}  // namespace wlt
