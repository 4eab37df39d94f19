#pragma once

#include <stdexcept>
#include <vector>

#include "posmnl/grid.hpp"
#include "posmnl/model.hpp"

namespace posmnl {

struct OptimizationResult {
  Placement placement;
  double revenue = 0.0;
  int iterations = 0;                // matching solves performed
  std::vector<double> lambda_trace;  // nondecreasing, ends at `revenue`
};

// Raised when the ratio iteration fails to converge within the iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), lambda_trace(std::move(trace)) {}
  std::vector<double> lambda_trace;
};

// Exact assortment-and-positioning optimizer.  Maximizes
//   sum_i r_i a_{i,sigma(i)} / (1 + sum_i a_{i,sigma(i)})
// over all placements by iterating the parametric problem
//   F(lambda) = max over matchings of sum (r_i - lambda) a_{i,k} x_{i,k} - lambda,
// starting from lambda = 0 (a valid lower bound).  Each step solves one
// max-weight matching over the strictly positive weights; the lambda iterates
// are nondecreasing and with epsilon = 0 the loop reaches F(lambda) = 0 in
// finitely many steps.  |F(lambda)| <= 1e-12 * (1 + matched attraction mass)
// is treated as zero (the weights carry rounding noise of that order), and a
// non-improving iterate also terminates.
//
// Preconditions: revenues in [0,1], attractions nonnegative and finite,
// epsilon >= 0.  Throws ConvergenceError after 100 iterations.
OptimizationResult dinkelbach_optimize(const std::vector<double>& revenues,
                                       const Grid<double>& attractions, double epsilon = 0.0);

OptimizationResult dinkelbach_optimize(const Instance& instance, double epsilon = 0.0);

// Reference optimizer: enumerates every placement (subsets of up to K
// products with injective position assignments) in lexicographic pair-list
// order, keeping the first maximizer, so ties resolve to the
// lexicographically smallest placement.  Refuses instances whose enumeration
// exceeds 1e7 placements.
OptimizationResult brute_force_optimize(const std::vector<double>& revenues,
                                        const Grid<double>& attractions);

OptimizationResult brute_force_optimize(const Instance& instance);

// Number of placements brute_force_optimize would visit:
// sum_{m=0..K} C(N,m) * K!/(K-m)!.  Saturates at infinity on overflow.
double enumeration_size(int num_products, int num_positions);

// Largest enumeration brute_force_optimize accepts.
inline constexpr double kEnumerationBudget = 1e7;

}  // namespace posmnl
