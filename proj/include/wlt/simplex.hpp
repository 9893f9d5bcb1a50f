// SPDX-License-Identifier: Apache-2.0
//
// Exact phase-1 simplex over the rationals for systems {x : Ax = b, x >= 0}.

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "wlt/rational.hpp"

namespace wlt {

/// Canonical-form tableau of an equality system with a feasible basis.
///
/// Rows are full rank: redundant equations are dropped during phase 1. Every
/// basic column is a unit vector and rhs() holds the basic values, all >= 0.
class FeasibleTableau {
 public:
  /// Phase-1 simplex with Bland's rule. Returns nullopt when infeasible.
  static std::optional<FeasibleTableau> phase_one(const RationalMatrix& a, std::vector<Rational> b);

  int rows() const { return rows_; }
  int vars() const { return vars_; }
  std::span<const int> basis() const { return basis_; }
  const Rational& coeff(int r, int c) const { return cells_[static_cast<std::size_t>(r) * width_ + c]; }

  /// Appends an identity block that tracks the right-hand side perturbation
  /// b + B0 (eps, eps^2, ...) for the current basis B0. Under it every basic
  /// solution is nondegenerate, so each entering column has a unique leaving
  /// row (see lex_leaving_row).
  void add_lexicographic_perturbation() {
    if (width_ != vars_) return;
    const int width = vars_ + rows_;
    std::vector<Rational> cells(static_cast<std::size_t>(rows_) * width);
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < vars_; ++c) cells[static_cast<std::size_t>(r) * width + c] = coeff(r, c);
      cells[static_cast<std::size_t>(r) * width + vars_ + r] = 1;
    }
    cells_ = std::move(cells);
    width_ = width;
  }

  /// Leaving row for entering column `col` under the lexicographic ratio
  /// test; -1 if the column has no positive entry.
  int lex_leaving_row(int col) const {
    int best = -1;
    for (int r = 0; r < rows_; ++r) {
      if (sgn(coeff(r, col)) <= 0) continue;
      if (best < 0 || lex_ratio_less(r, best, col)) best = r;
    }
    return best;
  }
  const Rational& rhs(int r) const { return rhs_[r]; }

  bool is_basic(int var) const { return std::find(basis_.begin(), basis_.end(), var) != basis_.end(); }

  std::vector<Rational> solution() const {
    std::vector<Rational> x(static_cast<std::size_t>(vars_));
    for (int r = 0; r < rows_; ++r) x[basis_[r]] = rhs_[r];
    return x;
  }

  /// Makes `col` basic in `row`. Feasibility is the caller's concern.
  void pivot(int row, int col) {
    const std::size_t w = static_cast<std::size_t>(width_);
    Rational* prow = &cells_[row * w];
    const Rational inv = 1 / prow[col];
    for (int c = 0; c < width_; ++c)
      if (sgn(prow[c]) != 0) prow[c] *= inv;
    rhs_[row] *= inv;
    for (int r = 0; r < rows_; ++r) {
      if (r == row) continue;
      Rational* cur = &cells_[r * w];
      if (sgn(cur[col]) == 0) continue;
      const Rational factor = cur[col];
      for (int c = 0; c < width_; ++c)
        if (sgn(prow[c]) != 0) cur[c] -= factor * prow[c];
      rhs_[r] -= factor * rhs_[row];
    }
    basis_[row] = col;
  }

 private:
  // (rhs_a, lex_a) / t_a,col  <lex  (rhs_b, lex_b) / t_b,col
  bool lex_ratio_less(int a, int b, int col) const {
    const Rational& da = coeff(a, col);
    const Rational& db = coeff(b, col);
    // Cross-multiplied; both pivots are positive.
    int cmp_rhs = cmp(rhs_[a] * db, rhs_[b] * da);
    if (cmp_rhs != 0) return cmp_rhs < 0;
    for (int c = vars_; c < width_; ++c) {
      int cmp_c = cmp(coeff(a, c) * db, coeff(b, c) * da);
      if (cmp_c != 0) return cmp_c < 0;
    }
    return false;
  }

  int rows_ = 0;
  int vars_ = 0;
  int width_ = 0;  // vars_ plus perturbation columns
  std::vector<Rational> cells_;
  std::vector<Rational> rhs_;
  std::vector<int> basis_;
};

namespace detail {

// Working tableau with an objective row for phase 1.
struct PhaseOneTableau {
  int rows = 0;
  int cols = 0;                  // original + artificial
  std::vector<Rational> cells;   // (rows + 1) x cols, last row is the objective
  std::vector<Rational> rhs;     // rows + 1
  std::vector<int> basis;

  Rational& at(int r, int c) { return cells[static_cast<std::size_t>(r) * cols + c]; }

  void pivot(int row, int col) {
    const Rational inv = 1 / at(row, col);
    for (int c = 0; c < cols; ++c)
      if (sgn(at(row, c)) != 0) at(row, c) *= inv;
    rhs[row] *= inv;
    for (int r = 0; r <= rows; ++r) {
      if (r == row || sgn(at(r, col)) == 0) continue;
      const Rational factor = at(r, col);
      for (int c = 0; c < cols; ++c)
        if (sgn(at(row, c)) != 0) at(r, c) -= factor * at(row, c);
      rhs[r] -= factor * rhs[row];
    }
    if (row < rows) basis[row] = col;
  }
};

}  // namespace detail

inline std::optional<FeasibleTableau> FeasibleTableau::phase_one(const RationalMatrix& a,
                                                                 std::vector<Rational> b) {
  const int m = a.rows();
  const int n = a.cols();
  if (static_cast<int>(b.size()) != m) throw std::invalid_argument("rhs size mismatch");

  detail::PhaseOneTableau t;
  t.rows = m;
  t.cols = n + m;
  t.cells.assign(static_cast<std::size_t>(m + 1) * t.cols, Rational(0));
  t.rhs.assign(static_cast<std::size_t>(m + 1), Rational(0));
  t.basis.resize(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) {
    const bool flip = sgn(b[r]) < 0;
    for (int c = 0; c < n; ++c) t.at(r, c) = flip ? Rational(-a(r, c)) : a(r, c);
    t.rhs[r] = flip ? Rational(-b[r]) : b[r];
    t.at(r, n + r) = 1;
    t.basis[r] = n + r;
  }
  // Objective: minimize the artificial sum, expressed in nonbasic terms.
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) t.at(m, c) -= t.at(r, c);
    t.rhs[m] -= t.rhs[r];
  }

  while (true) {
    int enter = -1;
    for (int c = 0; c < t.cols; ++c) {
      if (sgn(t.at(m, c)) < 0) {
        enter = c;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    Rational best;
    for (int r = 0; r < m; ++r) {
      if (sgn(t.at(r, enter)) <= 0) continue;
      Rational ratio = t.rhs[r] / t.at(r, enter);
      if (leave < 0 || ratio < best || (ratio == best && t.basis[r] < t.basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    // The phase-1 objective is bounded below by zero.
    if (leave < 0) throw std::logic_error("unbounded phase-1 objective");
    t.pivot(leave, enter);
  }
  if (sgn(t.rhs[m]) != 0) return std::nullopt;

  // Drive zero-valued artificials out of the basis; rows where that is
  // impossible are linear combinations of others and get dropped.
  std::vector<char> keep(static_cast<std::size_t>(m), 1);
  for (int r = 0; r < m; ++r) {
    if (t.basis[r] < n) continue;
    int col = -1;
    for (int c = 0; c < n; ++c) {
      if (sgn(t.at(r, c)) != 0) {
        col = c;
        break;
      }
    }
    if (col < 0) {
      keep[r] = 0;
    } else {
      t.pivot(r, col);
    }
  }

  FeasibleTableau out;
  out.vars_ = n;
  out.width_ = n;
  for (int r = 0; r < m; ++r) {
    if (!keep[r]) continue;
    for (int c = 0; c < n; ++c) out.cells_.push_back(t.at(r, c));
    out.rhs_.push_back(t.rhs[r]);
    out.basis_.push_back(t.basis[r]);
    ++out.rows_;
  }
  return out;
}

}  // namespace wlt
