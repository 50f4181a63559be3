#pragma once

// Rectangular maximum-weight assignment (Hungarian method with potentials,
// O(n^2 m) for n <= m).

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace typeqal {

/// Row-major weight matrix.
struct WeightMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  WeightMatrix() = default;
  WeightMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Injective (row, col) pairs, one per row of the smaller side.
using Matching = std::vector<std::pair<std::size_t, std::size_t>>;

namespace detail {

// Minimizes total cost; requires n <= m. Returns for each row its column.
inline std::vector<std::size_t> hungarian_min(std::size_t n, std::size_t m,
                                              const std::vector<double>& cost) {
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; index 0 is the virtual source row/column.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace detail

/// Matching of size min(rows, cols) maximizing the summed weight.
inline Matching max_weight_matching(const WeightMatrix& w) {
  Matching out;
  if (w.rows == 0 || w.cols == 0) return out;
  const bool transpose = w.rows > w.cols;
  const std::size_t n = transpose ? w.cols : w.rows;
  const std::size_t m = transpose ? w.rows : w.cols;
  std::vector<double> cost(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) cost[i * m + j] = -(transpose ? w(j, i) : w(i, j));
  }
  const auto assign = detail::hungarian_min(n, m, cost);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(transpose ? assign[i] : i, transpose ? i : assign[i]);
  }
  return out;
}

}  // namespace typeqal
