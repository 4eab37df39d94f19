#include "posmnl/optimize.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "posmnl/matching.hpp"

namespace posmnl {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kZeroTolerance = 1e-12;

void check_inputs(const std::vector<double>& revenues, const Grid<double>& attractions,
                  double epsilon) {
  if (attractions.rows() != static_cast<int>(revenues.size())) {
    throw std::invalid_argument("revenues size " + std::to_string(revenues.size()) +
                                " does not match attraction rows " +
                                std::to_string(attractions.rows()));
  }
  if (attractions.rows() < 1 || attractions.cols() < 1) {
    throw std::invalid_argument("need at least one product and one position");
  }
  for (std::size_t i = 0; i < revenues.size(); ++i) {
    if (!(std::isfinite(revenues[i]) && revenues[i] >= 0.0 && revenues[i] <= 1.0)) {
      throw std::invalid_argument("revenues[" + std::to_string(i + 1) + "] outside [0,1]");
    }
  }
  for (int i = 0; i < attractions.rows(); ++i) {
    for (int k = 0; k < attractions.cols(); ++k) {
      if (!(std::isfinite(attractions(i, k)) && attractions(i, k) >= 0.0)) {
        throw std::invalid_argument("attraction [" + std::to_string(i + 1) + "][" +
                                    std::to_string(k + 1) + "] must be finite and nonnegative");
      }
    }
  }
  if (!(std::isfinite(epsilon) && epsilon >= 0.0)) {
    throw std::invalid_argument("epsilon must be nonnegative");
  }
}

}  // namespace

OptimizationResult dinkelbach_optimize(const std::vector<double>& revenues,
                                       const Grid<double>& attractions, double epsilon) {
  check_inputs(revenues, attractions, epsilon);
  const int n = attractions.rows();
  const int k = attractions.cols();

  OptimizationResult result;
  double lambda = 0.0;
  result.lambda_trace.push_back(lambda);
  Grid<double> weights(n, k);
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    for (int i = 0; i < n; ++i) {
      const double margin = revenues[i] - lambda;
      for (int c = 0; c < k; ++c) weights(i, c) = margin * attractions(i, c);
    }
    const MatchingResult match = max_weight_matching(weights);
    result.iterations = iter;
    double num = 0.0;
    double den = 1.0;
    for (const auto& pp : match.pairs) {
      num += revenues[pp.product] * attractions(pp.product, pp.position);
      den += attractions(pp.product, pp.position);
    }
    // The weights carry rounding noise proportional to the matched attraction
    // mass, so the zero test scales with it.
    const double stop_tol = std::max(epsilon, kZeroTolerance * den);
    const double next = num / den;
    if (std::abs(match.total_weight - lambda) <= stop_tol || next <= lambda) {
      result.placement = Placement(match.pairs, n, k);
      result.revenue = lambda;
      return result;
    }
    lambda = next;
    result.lambda_trace.push_back(lambda);
  }
  throw ConvergenceError("ratio iteration did not converge within " +
                             std::to_string(kMaxIterations) + " iterations",
                         result.lambda_trace);
}

OptimizationResult dinkelbach_optimize(const Instance& instance, double epsilon) {
  return dinkelbach_optimize(instance.revenues(), instance.attraction_matrix(), epsilon);
}

double enumeration_size(int num_products, int num_positions) {
  double total = 0.0;
  double binom = 1.0;        // C(N, m)
  double arrangements = 1.0;  // K! / (K-m)!
  for (int m = 0; m <= num_positions; ++m) {
    if (m > 0) {
      if (m > num_products) break;
      binom *= static_cast<double>(num_products - m + 1) / m;
      arrangements *= static_cast<double>(num_positions - m + 1);
    }
    total += binom * arrangements;
    if (!std::isfinite(total)) return std::numeric_limits<double>::infinity();
  }
  return total;
}

namespace {

struct EnumerationState {
  const std::vector<double>* revenues;
  const Grid<double>* attractions;
  int num_products;
  int num_positions;
  std::vector<ProductPosition> current;
  std::uint64_t used_positions = 0;
  double best_value = -1.0;
  std::vector<ProductPosition> best;

  // Visits extensions of `current` whose first new product is > last product,
  // in ascending (product, position) order; `num` / `den` carry the running
  // revenue sums.  Visit order is the lexicographic order of pair lists, and
  // only strict improvements replace the incumbent, so the first maximizer
  // (the lexicographically smallest one) wins.
  void extend(int next_product, double num, double den) {
    const double value = num / den;
    if (value > best_value) {
      best_value = value;
      best = current;
    }
    if (static_cast<int>(current.size()) == num_positions) return;
    for (int i = next_product; i < num_products; ++i) {
      for (int k = 0; k < num_positions; ++k) {
        if (used_positions & (std::uint64_t{1} << k)) continue;
        const double a = (*attractions)(i, k);
        current.push_back({i, k});
        used_positions |= std::uint64_t{1} << k;
        extend(i + 1, num + (*revenues)[i] * a, den + a);
        used_positions &= ~(std::uint64_t{1} << k);
        current.pop_back();
      }
    }
  }
};

}  // namespace

OptimizationResult brute_force_optimize(const std::vector<double>& revenues,
                                        const Grid<double>& attractions) {
  check_inputs(revenues, attractions, 0.0);
  const int n = attractions.rows();
  const int k = attractions.cols();
  const double size = enumeration_size(n, k);
  if (!(size <= kEnumerationBudget)) {
    throw std::invalid_argument("enumeration of " + std::to_string(size) +
                                " placements exceeds the 1e7 budget (N=" + std::to_string(n) +
                                ", K=" + std::to_string(k) + ")");
  }
  if (k > 63) throw std::invalid_argument("more than 63 positions are not supported");

  EnumerationState state;
  state.revenues = &revenues;
  state.attractions = &attractions;
  state.num_products = n;
  state.num_positions = k;
  state.extend(0, 0.0, 1.0);

  OptimizationResult result;
  result.placement = Placement(state.best, n, k);
  result.revenue = state.best_value;
  result.iterations = 1;
  result.lambda_trace = {state.best_value};
  return result;
}

OptimizationResult brute_force_optimize(const Instance& instance) {
  return brute_force_optimize(instance.revenues(), instance.attraction_matrix());
}

}  // namespace posmnl
