#include "posmnl/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "posmnl/estimation.hpp"
#include "posmnl/instances.hpp"
#include "posmnl/optimize.hpp"
#include "posmnl/policies.hpp"
#include "posmnl/simulate.hpp"

namespace posmnl {

namespace {

std::string compact(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", value);
  return buf;
}

// Small corpus shared by the optimizer suites: both model kinds over every
// (N, K) with N <= 6, K <= min(N, 3).
std::vector<Instance> small_corpus(int count) {
  std::vector<Instance> corpus;
  corpus.reserve(static_cast<std::size_t>(count));
  int seed = 0;
  while (static_cast<int>(corpus.size()) < count) {
    for (int n = 1; n <= 6 && static_cast<int>(corpus.size()) < count; ++n) {
      for (int k = 1; k <= std::min(n, 3) && static_cast<int>(corpus.size()) < count; ++k) {
        const auto kind = (seed % 2 == 0) ? ModelKind::multiplicative : ModelKind::general;
        corpus.push_back(random_instance(n, k, kind, static_cast<std::uint64_t>(seed)));
        ++seed;
      }
    }
  }
  return corpus;
}

bool oracle_equivalence(std::ostream& out) {
  const auto corpus = small_corpus(200);
  double worst = 0.0;
  for (const auto& instance : corpus) {
    const auto exact = dinkelbach_optimize(instance, 0.0);
    const auto reference = brute_force_optimize(instance);
    const double revenue_gap = std::abs(exact.revenue - reference.revenue);
    const double placement_gap = std::abs(expected_revenue(instance, exact.placement) -
                                          expected_revenue(instance, reference.placement));
    worst = std::max({worst, revenue_gap, placement_gap});
    if (revenue_gap > 1e-9 || placement_gap > 1e-9) {
      out << "[FAIL] oracle-equivalence: " << instance.name() << " ratio iteration "
          << exact.revenue << " vs enumeration " << reference.revenue << "\n";
      return false;
    }
  }
  out << "[ok] oracle-equivalence: 200 instances, max gap " << compact(worst) << "\n";
  return true;
}

bool optimizer_invariants(std::ostream& out) {
  auto corpus = small_corpus(60);
  for (int id = 1; id <= 6; ++id) corpus.push_back(example_instance(id));
  corpus.push_back(hard_instance(8, 2, 1000).instance);
  int max_iterations = 0;
  for (const auto& instance : corpus) {
    const auto result = dinkelbach_optimize(instance, 0.0);
    max_iterations = std::max(max_iterations, result.iterations);
    if (!std::is_sorted(result.lambda_trace.begin(), result.lambda_trace.end())) {
      out << "[FAIL] optimizer-invariants: " << instance.name()
          << " produced a decreasing lambda trace\n";
      return false;
    }
    if (result.lambda_trace.empty() || result.lambda_trace.back() != result.revenue) {
      out << "[FAIL] optimizer-invariants: " << instance.name()
          << " trace does not end at the returned revenue\n";
      return false;
    }
    const double direct = expected_revenue(instance, result.placement);
    if (std::abs(direct - result.revenue) > 1e-9) {
      out << "[FAIL] optimizer-invariants: " << instance.name() << " placement revenue "
          << direct << " != reported " << result.revenue << "\n";
      return false;
    }
  }
  out << "[ok] optimizer-invariants: 67 instances, max iterations " << max_iterations << "\n";
  return true;
}

bool sampler_invariants(std::ostream& out) {
  Rng rng(0x5e1f7e57);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(6));
    const int k = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(std::min(n, 3))));
    const auto kind = trial % 2 == 0 ? ModelKind::multiplicative : ModelKind::general;
    const auto instance = random_instance(n, k, kind, 900 + static_cast<std::uint64_t>(trial));
    // A maximal placement: products 0..k-1 at positions 0..k-1.
    std::vector<ProductPosition> pairs;
    for (int c = 0; c < k; ++c) pairs.push_back({c, c});
    const Placement placement(pairs, n, k);

    const auto dist = choice_distribution(instance, placement);
    double total = dist.outside;
    for (double p : dist.by_pair) {
      if (p < 0.0) {
        out << "[FAIL] sampler-invariants: negative choice probability\n";
        return false;
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      out << "[FAIL] sampler-invariants: probabilities sum to " << total << "\n";
      return false;
    }

    constexpr int kDraws = 20000;
    std::vector<int> hits(static_cast<std::size_t>(k) + 1);
    for (int d = 0; d < kDraws; ++d) {
      const auto outcome = sample_choice(instance, placement, rng);
      ++hits[static_cast<std::size_t>(outcome.is_outside() ? k : outcome.chosen)];
    }
    for (int c = 0; c <= k; ++c) {
      const double expect = c == k ? dist.outside : dist.by_pair[static_cast<std::size_t>(c)];
      const double gap = std::abs(static_cast<double>(hits[static_cast<std::size_t>(c)]) / kDraws -
                                  expect);
      worst = std::max(worst, gap);
      if (gap > 0.02) {
        out << "[FAIL] sampler-invariants: frequency off by " << gap << " on trial " << trial
            << "\n";
        return false;
      }
    }
  }
  out << "[ok] sampler-invariants: 20 placements x 20000 draws, max frequency gap "
      << compact(worst) << "\n";
  return true;
}

bool estimation_invariants(std::ostream& out) {
  Rng rng(0xe57a7e);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 1 + static_cast<int>(rng.next_below(3));
    std::vector<double> theta(static_cast<std::size_t>(k));
    for (auto& t : theta) t = rng.next_double_open0();
    theta[0] = 1.0;
    std::vector<long long> n_row(static_cast<std::size_t>(k));
    std::vector<long long> w_row(static_cast<std::size_t>(k));
    long long total_n = 0;
    for (int c = 0; c < k; ++c) {
      n_row[static_cast<std::size_t>(c)] = static_cast<long long>(rng.next_below(50));
      w_row[static_cast<std::size_t>(c)] = n_row[static_cast<std::size_t>(c)] == 0
                                               ? 0
                                               : static_cast<long long>(rng.next_below(
                                                     static_cast<std::uint64_t>(
                                                         n_row[static_cast<std::size_t>(c)] + 1)));
      total_n += n_row[static_cast<std::size_t>(c)];
    }
    if (total_n == 0) n_row[0] = 1;

    double previous = score(0.0, n_row, w_row, theta);
    for (double v : {0.25, 0.5, 1.0, 2.0, 8.0}) {
      const double current = score(v, n_row, w_row, theta);
      if (current >= previous) {
        out << "[FAIL] estimation-invariants: score not strictly decreasing\n";
        return false;
      }
      previous = current;
    }

    const double v_hat = solve_clipped_mle(n_row, w_row, theta);
    if (!(v_hat >= 0.0 && v_hat <= 1.0)) {
      out << "[FAIL] estimation-invariants: clipped estimate " << v_hat << " outside [0,1]\n";
      return false;
    }
    if (v_hat < 1.0 && std::abs(score(v_hat, n_row, w_row, theta)) > 1e-8) {
      out << "[FAIL] estimation-invariants: interior estimate leaves score "
          << score(v_hat, n_row, w_row, theta) << "\n";
      return false;
    }
    const double d = effective_exposure(n_row, theta);
    if (ucb_multiplicative(v_hat, d, 10.0) < v_hat) {
      out << "[FAIL] estimation-invariants: confidence value below the estimate\n";
      return false;
    }

    const long long n = 1 + static_cast<long long>(rng.next_below(200));
    const long long w = static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(n + 1)));
    const auto general = ucb_general(n, w, 10.0);
    if (!(general.p_ucb <= 0.5 && general.p_ucb >= 0.0)) {
      out << "[FAIL] estimation-invariants: win-rate bound " << general.p_ucb
          << " outside [0,1/2]\n";
      return false;
    }
    if (std::abs(general.v_ucb - general.p_ucb / (1.0 - general.p_ucb)) > 1e-12) {
      out << "[FAIL] estimation-invariants: odds mismatch\n";
      return false;
    }
  }
  out << "[ok] estimation-invariants: 40 randomized stats tables\n";
  return true;
}

bool policy_invariants(std::ostream& out) {
  constexpr long long kHorizon = 300;
  for (const auto& id : policy_ids()) {
    // Multiplicative-only policies run on example 1, the rest also on 4.
    std::vector<int> instances = {1};
    if (id == "gp2" || id == "epoch-ucb-gen") instances.push_back(4);
    for (int example : instances) {
      const Instance instance = example_instance(example);
      auto policy = make_policy(id, instance, kHorizon);
      Rng rng(derive_stream(123, static_cast<std::uint64_t>(example)));
      const RegretTrace trace = run_simulation(instance, *policy, kHorizon, rng);
      double previous = 0.0;
      for (std::size_t t = 0; t < trace.instantaneous.size(); ++t) {
        if (trace.instantaneous[t] < -1e-9 || trace.cumulative[t] < previous - 1e-9) {
          out << "[FAIL] policy-invariants: " << id << " on example " << example
              << " produced negative pseudo-regret at round " << (t + 1) << "\n";
          return false;
        }
        previous = trace.cumulative[t];
      }
    }

    // With the true attractions substituted for the confidence values every
    // optimizing select is offline-optimal, so the trace must vanish (ep2mle
    // still spends its forced-exploration prefix off the optimum).
    const Instance instance = example_instance(id == "gp2" || id == "epoch-ucb-gen" ? 4 : 1);
    auto oracle_policy = make_policy(id, instance, kHorizon);
    oracle_policy->use_oracle_attractions(instance.attraction_matrix());
    Rng rng(derive_stream(123, 99));
    const RegretTrace trace = run_simulation(instance, *oracle_policy, kHorizon, rng);
    const std::size_t skip =
        id == "ep2mle"
            ? static_cast<std::size_t>(std::ceil(0.1 * std::sqrt(static_cast<double>(kHorizon))))
            : 0;
    for (std::size_t t = skip; t < trace.instantaneous.size(); ++t) {
      if (trace.instantaneous[t] > 1e-9) {
        out << "[FAIL] policy-invariants: " << id << " with oracle attractions lost revenue at "
            << "round " << (t + 1) << "\n";
        return false;
      }
    }
  }
  out << "[ok] policy-invariants: " << policy_ids().size()
      << " policies, nonnegative pseudo-regret and zero oracle regret\n";
  return true;
}

}  // namespace

bool run_selftest(std::ostream& out) {
  bool all = true;
  all = oracle_equivalence(out) && all;
  all = optimizer_invariants(out) && all;
  all = sampler_invariants(out) && all;
  all = estimation_invariants(out) && all;
  all = policy_invariants(out) && all;
  out << (all ? "selftest passed\n" : "selftest FAILED\n");
  return all;
}

}  // namespace posmnl
