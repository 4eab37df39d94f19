#include "posmnl/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace posmnl {

namespace {

// Hungarian algorithm with row/column potentials; returns, for each column,
// the row assigned to it.  cost is a flat n x n row-major matrix.
std::vector<int> solve_min_cost_assignment(const std::vector<double>& cost, int n) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual column holding the row currently
  // being inserted.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = kInf;
      const double* row = cost.data() + static_cast<std::size_t>(i0 - 1) * n;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
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
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_of_col(n, 0);
  for (int j = 1; j <= n; ++j) row_of_col[j - 1] = p[j] - 1;
  return row_of_col;
}

}  // namespace

MatchingResult max_weight_matching(const Grid<double>& weights) {
  const int num_products = weights.rows();
  const int num_positions = weights.cols();
  if (num_products < 1 || num_positions < 1) {
    throw std::invalid_argument("matching needs at least one product and one position");
  }
  for (int i = 0; i < num_products; ++i) {
    for (int k = 0; k < num_positions; ++k) {
      if (!std::isfinite(weights(i, k))) {
        throw std::invalid_argument("matching weight [" + std::to_string(i + 1) + "][" +
                                    std::to_string(k + 1) + "] is not finite");
      }
    }
  }

  // Clamping negatives to zero makes "leave unmatched" as good as taking the
  // edge, so a perfect assignment on the padded square matrix realizes the
  // optimal partial matching over positive edges.
  const int n = std::max(num_products, num_positions);
  std::vector<double> cost(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < num_products; ++i) {
    for (int k = 0; k < num_positions; ++k) {
      cost[static_cast<std::size_t>(i) * n + k] = -std::max(weights(i, k), 0.0);
    }
  }

  const std::vector<int> row_of_col = solve_min_cost_assignment(cost, n);
  MatchingResult result;
  for (int k = 0; k < num_positions; ++k) {
    const int i = row_of_col[k];
    if (i < num_products && weights(i, k) > 0.0) {
      result.pairs.push_back({i, k});
      result.total_weight += weights(i, k);
    }
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

}  // namespace posmnl
