#pragma once

#include <vector>

#include "posmnl/grid.hpp"
#include "posmnl/model.hpp"

namespace posmnl {

struct MatchingResult {
  std::vector<ProductPosition> pairs;  // sorted by product index
  double total_weight = 0.0;
};

// Maximum-weight bipartite matching between products (rows) and positions
// (columns).  Only strictly positive weights may enter the matching, so rows
// and columns can stay unmatched; weights may be negative.  Solved as an
// assignment problem on a square matrix padded with zero-weight dummies,
// O(max(N,K)^3).  Deterministic: scan order is fixed, output sorted by
// product.  Throws std::invalid_argument on empty or non-finite input.
MatchingResult max_weight_matching(const Grid<double>& weights);

}  // namespace posmnl
