#pragma once

#include "mahler/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace mahler::detail {

template <class T>
using Matrix = std::vector<std::vector<T>>;

inline double magnitude(double v) { return std::fabs(v); }
inline double magnitude(const Rational& v) { return std::fabs(v.get_d()); }

/// Basis of {x : rows * x = 0} by Gauss-Jordan elimination. Exact for
/// rationals; for doubles, pivots below rel_tol * max|entry| count as zero.
/// Each basis vector has a 1 in its free column.
template <class T>
std::vector<std::vector<T>> nullspace(Matrix<T> rows, std::size_t ncols, double rel_tol = 1e-10) {
  double scale = 0.0;
  for (const auto& r : rows) {
    for (const auto& v : r) scale = std::max(scale, magnitude(v));
  }
  const double eps = rel_tol * scale;
  std::vector<std::size_t> pivot_cols;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < ncols && rank < rows.size(); ++col) {
    std::size_t best = rows.size();
    if constexpr (is_exact_v<T>) {
      for (std::size_t r = rank; r < rows.size(); ++r) {
        if (sgn(rows[r][col]) != 0) {
          best = r;
          break;
        }
      }
    } else {
      double best_mag = eps;
      for (std::size_t r = rank; r < rows.size(); ++r) {
        if (magnitude(rows[r][col]) > best_mag) {
          best_mag = magnitude(rows[r][col]);
          best = r;
        }
      }
    }
    if (best == rows.size()) continue;
    std::swap(rows[rank], rows[best]);
    const T inv = T(1) / rows[rank][col];
    for (auto& v : rows[rank]) v = T(v * inv);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank) continue;
      const T factor = rows[r][col];
      if (factor == 0) continue;
      for (std::size_t c = col; c < ncols; ++c) rows[r][c] -= factor * rows[rank][c];
    }
    pivot_cols.push_back(col);
    ++rank;
  }
  std::vector<bool> is_pivot(ncols, false);
  for (std::size_t c : pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<T>> basis;
  for (std::size_t free = 0; free < ncols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<T> v(ncols, T(0));
    v[free] = T(1);
    for (std::size_t r = 0; r < pivot_cols.size(); ++r) v[pivot_cols[r]] = T(-rows[r][free]);
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace mahler::detail
