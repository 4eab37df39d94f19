#pragma once

#include <cstdint>
#include <optional>

#include "posmnl/model.hpp"

namespace posmnl {

// The six benchmark instances used throughout the tests and CLI:
//   1: N=3,  K=2,  multiplicative     4: N=5,  K=3,  general
//   2: N=5,  K=3,  multiplicative     5: N=8,  K=4,  general
//   3: N=30, K=10, multiplicative     6: N=10, K=5,  general
Instance example_instance(int id);

struct HardInstance {
  Instance instance;
  Placement target;    // the uniquely optimal placement
  double epsilon = 0;  // sqrt(K*N / (243*T))
};

// Worst-case general-model instance with unit revenues: attraction is
// (1+epsilon)/K on the K target pairs and 1/K elsewhere, where
// epsilon = sqrt(K*N/(243*T)).  Requires K <= N and T >= 4*K*N/243 (so
// epsilon <= 1/2).  The target is the given placement if provided, else
// drawn uniformly from the given seed, else the diagonal {(i,i)}.
HardInstance hard_instance(int num_products, int num_positions, long long horizon,
                           std::optional<Placement> target = std::nullopt,
                           std::optional<std::uint64_t> target_seed = std::nullopt);

// Seeded random instance: revenues uniform on [0,1); multiplicative kind
// draws v on (0,1] and theta on (0,1] max-normalized to 1; general kind draws
// every attraction on (0,1].
Instance random_instance(int num_products, int num_positions, ModelKind kind,
                         std::uint64_t seed);

}  // namespace posmnl
