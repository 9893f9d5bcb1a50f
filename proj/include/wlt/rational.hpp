// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wlt {

using Rational = mpq_class;

/// "num/den" with the denominator always present ("0/1", "1/6").
inline std::string to_fraction_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rational parse_fraction(const std::string& s) {
  Rational q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("not a fraction: " + s);
  q.canonicalize();
  return q;
}

/// Dense row-major matrix of exact rationals.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows) * cols) {}

  static RationalMatrix identity(int n) {
    RationalMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Rational& operator()(int r, int c) { return entries_[index(r, c)]; }
  const Rational& operator()(int r, int c) const { return entries_[index(r, c)]; }

  const std::vector<Rational>& entries() const { return entries_; }

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
    RationalMatrix out(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        if (sgn(a(i, k)) == 0) continue;
        for (int j = 0; j < b.cols_; ++j) out(i, j) += a(i, k) * b(k, j);
      }
    return out;
  }

  bool is_doubly_stochastic() const {
    if (rows_ != cols_) return false;
    for (const auto& x : entries_)
      if (sgn(x) < 0) return false;
    for (int i = 0; i < rows_; ++i) {
      Rational row = 0, col = 0;
      for (int j = 0; j < cols_; ++j) {
        row += (*this)(i, j);
        col += (*this)(j, i);
      }
      if (row != 1 || col != 1) return false;
    }
    return true;
  }

  /// 0/1 with exactly one 1 in every row and column.
  bool is_permutation_matrix() const {
    if (!is_doubly_stochastic()) return false;
    for (const auto& x : entries_)
      if (x != 0 && x != 1) return false;
    return true;
  }

  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }
  friend bool operator<(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.rows_ != b.rows_) return a.rows_ < b.rows_;
    if (a.cols_ != b.cols_) return a.cols_ < b.cols_;
    return a.entries_ < b.entries_;
  }

 private:
  std::size_t index(int r, int c) const {
    if (r < 0 || c < 0 || r >= rows_ || c >= cols_) throw std::out_of_range("matrix index");
    return static_cast<std::size_t>(r) * cols_ + c;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rational> entries_;
};

}  // namespace wlt
