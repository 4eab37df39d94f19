#include "posmnl/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "posmnl/rng.hpp"

namespace posmnl {

namespace {

Instance make_general(std::string name, std::vector<double> revenues,
                      std::vector<std::vector<double>> rows) {
  const int n = static_cast<int>(rows.size());
  const int k = static_cast<int>(rows.front().size());
  Grid<double> v(n, k);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < k; ++c) v(i, c) = rows[i][c];
  }
  return Instance(std::move(name), std::move(revenues), GeneralModel{std::move(v)});
}

}  // namespace

Instance example_instance(int id) {
  switch (id) {
    case 1:
      return Instance("example-1", {0.8, 0.75, 0.5},
                      MultiplicativeModel{{0.25, 0.4, 0.8}, {1.0, 0.5}}, 2);
    case 2:
      return Instance("example-2", {0.4, 0.2, 0.8, 0.6, 0.2},
                      MultiplicativeModel{{1.0, 0.8, 0.6, 0.4, 0.2}, {1.0, 0.5, 1.0 / 3.0}}, 3);
    case 3: {
      const int n = 30;
      const int k = 10;
      std::vector<double> v(n), r(n), theta(k);
      for (int i = 0; i < n; ++i) {
        v[i] = static_cast<double>(30 - i) / 30.0;  // (31 - i)/30 for 1-based i
        r[i] = static_cast<double>(i + 10) / 40.0;  // (i + 9)/40 for 1-based i
      }
      for (int c = 0; c < k; ++c) theta[c] = static_cast<double>(10 - c) / 10.0;
      return Instance("example-3", std::move(r), MultiplicativeModel{std::move(v), std::move(theta)},
                      k);
    }
    case 4:
      return make_general("example-4", {0.9, 0.8, 0.9, 0.6, 0.5},
                          {{0.4, 0.1, 0.1},
                           {0.1, 0.5, 0.1},
                           {0.2, 0.2, 0.6},
                           {0.3, 0.1, 0.4},
                           {0.1, 0.1, 0.1}});
    case 5:
      return make_general("example-5", {0.9, 0.8, 0.9, 0.6, 0.5, 0.7, 0.4, 0.3},
                          {{0.8, 0.6, 0.5, 0.2},
                           {0.1, 0.5, 0.9, 0.3},
                           {0.6, 0.2, 0.6, 0.1},
                           {0.3, 0.1, 0.4, 0.5},
                           {0.7, 0.1, 0.1, 0.8},
                           {0.2, 0.5, 0.4, 0.6},
                           {0.4, 0.3, 0.8, 0.2},
                           {0.1, 0.1, 0.1, 0.1}});
    case 6:
      return make_general("example-6", {0.9, 0.8, 0.9, 0.7, 0.6, 0.5, 0.7, 0.4, 0.6, 0.3},
                          {{0.8, 0.6, 0.5, 0.2, 0.1},
                           {0.4, 0.5, 0.9, 0.3, 0.2},
                           {0.6, 0.3, 0.6, 0.1, 0.3},
                           {0.3, 0.7, 0.4, 0.5, 0.4},
                           {0.7, 0.1, 0.2, 0.8, 0.5},
                           {0.3, 0.5, 0.4, 0.6, 0.4},
                           {0.4, 0.4, 0.8, 0.2, 0.3},
                           {0.6, 0.1, 0.2, 0.1, 0.1},
                           {0.2, 0.3, 0.1, 0.4, 0.2},
                           {0.5, 0.4, 0.3, 0.1, 0.1}});
    default:
      throw std::invalid_argument("example id must be 1..6, got " + std::to_string(id));
  }
}

HardInstance hard_instance(int num_products, int num_positions, long long horizon,
                           std::optional<Placement> target,
                           std::optional<std::uint64_t> target_seed) {
  const int n = num_products;
  const int k = num_positions;
  if (k < 1 || n < k) {
    throw std::invalid_argument("hard instance requires 1 <= K <= N (got N=" +
                                std::to_string(n) + ", K=" + std::to_string(k) + ")");
  }
  const double t = static_cast<double>(horizon);
  if (!(t >= 4.0 * k * n / 243.0)) {
    throw std::invalid_argument("hard instance requires T >= 4*K*N/243 = " +
                                std::to_string(4.0 * k * n / 243.0) +
                                " so that epsilon <= 1/2, got T = " + std::to_string(horizon));
  }
  const double epsilon = std::sqrt(static_cast<double>(k) * n / (243.0 * t));

  Placement target_placement;
  if (target.has_value()) {
    if (static_cast<int>(target->size()) != k) {
      throw std::invalid_argument("target placement must fill all " + std::to_string(k) +
                                  " positions");
    }
    target_placement = *std::move(target);
  } else {
    std::vector<ProductPosition> pairs(k);
    if (target_seed.has_value()) {
      Rng rng(*target_seed);
      // Partial Fisher-Yates: uniform ordered K-tuple of distinct products,
      // assigned to positions 1..K in draw order.
      std::vector<int> products(n);
      std::iota(products.begin(), products.end(), 0);
      for (int c = 0; c < k; ++c) {
        const auto j = c + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - c)));
        std::swap(products[c], products[j]);
        pairs[c] = {products[c], c};
      }
    } else {
      for (int c = 0; c < k; ++c) pairs[c] = {c, c};
    }
    target_placement = Placement(std::move(pairs), n, k);
  }

  Grid<double> attractions(n, k, 1.0 / k);
  for (const auto& pp : target_placement.pairs()) {
    attractions(pp.product, pp.position) = (1.0 + epsilon) / k;
  }
  std::string name = "hard-N" + std::to_string(n) + "-K" + std::to_string(k) + "-T" +
                     std::to_string(horizon);
  Instance instance(std::move(name), std::vector<double>(n, 1.0),
                    GeneralModel{std::move(attractions)});
  return HardInstance{std::move(instance), std::move(target_placement), epsilon};
}

Instance random_instance(int num_products, int num_positions, ModelKind kind,
                         std::uint64_t seed) {
  if (num_positions < 1 || num_products < num_positions) {
    throw std::invalid_argument("random instance requires 1 <= K <= N (got N=" +
                                std::to_string(num_products) + ", K=" +
                                std::to_string(num_positions) + ")");
  }
  Rng rng(seed);
  std::vector<double> revenues(num_products);
  for (double& r : revenues) r = rng.next_double();
  std::string name = "random-" + std::string(kind == ModelKind::multiplicative ? "mult" : "gen") +
                     "-N" + std::to_string(num_products) + "-K" + std::to_string(num_positions) +
                     "-seed" + std::to_string(seed);
  if (kind == ModelKind::multiplicative) {
    std::vector<double> v(num_products), theta(num_positions);
    for (double& x : v) x = rng.next_double_open0();
    for (double& x : theta) x = rng.next_double_open0();
    const double theta_max = *std::max_element(theta.begin(), theta.end());
    for (double& x : theta) x /= theta_max;
    // Guard against rounding in the normalization; max must be exactly 1.
    theta[static_cast<std::size_t>(std::max_element(theta.begin(), theta.end()) -
                                   theta.begin())] = 1.0;
    return Instance(std::move(name), std::move(revenues),
                    MultiplicativeModel{std::move(v), std::move(theta)}, num_positions);
  }
  Grid<double> attractions(num_products, num_positions);
  for (int i = 0; i < num_products; ++i) {
    for (int c = 0; c < num_positions; ++c) attractions(i, c) = rng.next_double_open0();
  }
  return Instance(std::move(name), std::move(revenues), GeneralModel{std::move(attractions)});
}

}  // namespace posmnl
