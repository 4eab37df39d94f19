#include <cmath>
#include <memory>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "posmnl/estimation.hpp"
#include "posmnl/instances.hpp"
#include "posmnl/model.hpp"
#include "posmnl/optimize.hpp"
#include "posmnl/policies.hpp"
#include "posmnl/rng.hpp"

using namespace posmnl;

namespace {

P2mleUcbPolicy make_p2mle_ex1(long long horizon = 2000) {
  const Instance ex1 = example_instance(1);
  return P2mleUcbPolicy(ex1.multiplicative()->theta, ex1.revenues(), horizon);
}

}  // namespace

TEST_CASE("select and observe must alternate") {
  P2mleUcbPolicy policy = make_p2mle_ex1();
  Rng rng(1);
  CHECK_THROWS_AS(policy.observe(Placement(), ChoiceOutcome{kOutsideOption}), std::logic_error);
  const Placement p = policy.select(rng);
  CHECK_THROWS_AS(policy.select(rng), std::logic_error);
  // observe must echo the selected placement
  CHECK_THROWS_AS(policy.observe(Placement(), ChoiceOutcome{kOutsideOption}), std::logic_error);
  // outcome must name a displayed product
  CHECK_THROWS_AS(policy.observe(p, ChoiceOutcome{2}), std::logic_error);
  policy.observe(p, ChoiceOutcome{kOutsideOption});
  CHECK_THROWS_AS(policy.observe(p, ChoiceOutcome{kOutsideOption}), std::logic_error);
}

TEST_CASE("product policy opens with the optimistic placement") {
  const Instance ex1 = example_instance(1);
  P2mleUcbPolicy policy = make_p2mle_ex1();
  // Before the first select every product sits at its optimistic value 1.
  CHECK(policy.upper_confidence() == std::vector<double>{1.0, 1.0, 1.0});

  Rng rng(1);
  const Placement p = policy.select(rng);
  CHECK(p == Placement({{0, 0}, {1, 1}}, 3, 2));

  // The optimistic objective it maximized: v=1 everywhere against theta.
  Grid<double> ones(3, 2);
  for (int i = 0; i < 3; ++i) {
    ones(i, 0) = 1.0;
    ones(i, 1) = 0.5;
  }
  const auto optimistic = dinkelbach_optimize(ex1.revenues(), ones);
  CHECK(optimistic.revenue == doctest::Approx(0.47).epsilon(1e-12));
  CHECK(optimistic.placement == p);
}

TEST_CASE("product policy updates exposures and confidence after a no-purchase") {
  P2mleUcbPolicy policy = make_p2mle_ex1();
  Rng rng(1);
  const Placement p = policy.select(rng);
  policy.observe(p, ChoiceOutcome{kOutsideOption});

  CHECK(policy.stats().n(0, 0) == 1);
  CHECK(policy.stats().n(1, 1) == 1);
  CHECK(policy.stats().w(0, 0) == 0);
  CHECK(policy.stats().w(1, 1) == 0);

  // Effective exposures (1, 0.5, 0); both displayed MLEs are 0, so the
  // confidence values collapse to the pure radius; product 3 keeps 1.
  const double ell = policy.params().ell;
  CHECK(policy.upper_confidence()[0] ==
        doctest::Approx(ucb_multiplicative(0.0, 1.0, ell)).epsilon(1e-15));
  CHECK(policy.upper_confidence()[1] ==
        doctest::Approx(ucb_multiplicative(0.0, 0.5, ell)).epsilon(1e-15));
  CHECK(policy.upper_confidence()[2] == 1.0);
}

TEST_CASE("a purchase refreshes only the chosen product") {
  P2mleUcbPolicy policy = make_p2mle_ex1();
  Rng rng(1);
  const Placement p = policy.select(rng);
  policy.observe(p, ChoiceOutcome{0});
  CHECK(policy.stats().n(0, 0) == 1);
  CHECK(policy.stats().w(0, 0) == 1);
  // Product 2 was displayed but not touched by a purchase of product 1.
  CHECK(policy.stats().n(1, 1) == 0);
  CHECK(policy.upper_confidence()[1] == 1.0);
  CHECK(policy.upper_confidence()[2] == 1.0);
  // All wins: MLE clips to 1, confidence sits above it.
  CHECK(policy.upper_confidence()[0] ==
        doctest::Approx(ucb_multiplicative(1.0, 1.0, policy.params().ell)).epsilon(1e-15));
}

TEST_CASE("pairwise policy opens with the top revenue products in order") {
  const Instance ex4 = example_instance(4);
  Gp2UcbPolicy policy(5, 3, ex4.revenues(), 20000);
  Rng rng(1);
  const Placement p = policy.select(rng);
  // All confidence values are 1, so only the product set matters; the K
  // highest-revenue products win and positions fall lexicographically.
  CHECK(p == Placement({{0, 0}, {1, 1}, {2, 2}}, 5, 3));

  policy.observe(p, ChoiceOutcome{kOutsideOption});
  const double big_l = policy.params().big_l;
  const double expected = ucb_general(1, 0, big_l).v_ucb;
  CHECK(policy.upper_confidence()(0, 0) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(policy.upper_confidence()(1, 1) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(policy.upper_confidence()(2, 2) == doctest::Approx(expected).epsilon(1e-15));
  // Pairs never displayed keep the optimistic value.
  CHECK(policy.upper_confidence()(0, 1) == 1.0);
  CHECK(policy.upper_confidence()(4, 0) == 1.0);
}

TEST_CASE("position weight estimation matches hand computations") {
  // Every product shows per-position win rates 2/7 and 1/6: odds 0.4 and 0.2,
  // so the normalized weights are (1, 0.5).
  PairwiseStats stats(2, 2);
  for (int product = 0; product < 2; ++product) {
    const Placement at0({{product, 0}}, 2, 2);
    const Placement at1({{product, 1}}, 2, 2);
    for (int t = 0; t < 2; ++t) stats.record(at0, ChoiceOutcome{product});
    for (int t = 0; t < 5; ++t) stats.record(at0, ChoiceOutcome{kOutsideOption});
    stats.record(at1, ChoiceOutcome{product});
    for (int t = 0; t < 5; ++t) stats.record(at1, ChoiceOutcome{kOutsideOption});
  }
  const ThetaEstimate est = estimate_theta(stats);
  CHECK(est.from_data);
  REQUIRE(est.theta.size() == 2);
  CHECK(est.theta[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.theta[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("position weight estimation edge cases") {
  // Symmetric statistics normalize to all ones.
  PairwiseStats symmetric(1, 2);
  for (int k = 0; k < 2; ++k) {
    const Placement p({{0, k}}, 1, 2);
    symmetric.record(p, ChoiceOutcome{0});
    symmetric.record(p, ChoiceOutcome{kOutsideOption});
  }
  const ThetaEstimate sym = estimate_theta(symmetric);
  CHECK(sym.from_data);
  CHECK(sym.theta == std::vector<double>{1.0, 1.0});

  // A position with no observations defaults to 1; a position with
  // observations but no purchases is floored at 0.01.
  PairwiseStats partial(1, 3);
  const Placement seen({{0, 0}}, 1, 3);
  partial.record(seen, ChoiceOutcome{0});
  partial.record(seen, ChoiceOutcome{kOutsideOption});
  const Placement dead({{0, 2}}, 1, 3);
  for (int t = 0; t < 4; ++t) partial.record(dead, ChoiceOutcome{kOutsideOption});
  const ThetaEstimate part = estimate_theta(partial);
  CHECK(part.from_data);
  CHECK(part.theta[0] == 1.0);
  CHECK(part.theta[1] == 1.0);
  CHECK(part.theta[2] == 0.01);

  // No signal at all: uniform weights, flagged.
  const ThetaEstimate blank = estimate_theta(PairwiseStats(2, 2));
  CHECK_FALSE(blank.from_data);
  CHECK(blank.theta == std::vector<double>{1.0, 1.0});
}

TEST_CASE("exploration-first policy phase structure") {
  const Instance ex1 = example_instance(1);
  ExploreP2mlePolicy policy(3, 2, ex1.revenues(), 10000);
  CHECK(policy.exploration_rounds() == 10);  // ceil(0.1 * sqrt(10000))
  CHECK(policy.exploring());
  CHECK_THROWS_AS(policy.estimated_theta(), std::logic_error);

  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    const Placement p = policy.select(rng);
    // Exploration always fills every position.
    CHECK(p.size() == 2);
    std::set<int> positions;
    for (const auto& pp : p.pairs()) positions.insert(pp.position);
    CHECK(positions == std::set<int>{0, 1});
    policy.observe(p, ChoiceOutcome{kOutsideOption});
    CHECK(policy.exploring());
  }

  // Round 11 flips to the estimate-driven phase with fresh statistics.
  const Placement first = policy.select(rng);
  CHECK_FALSE(policy.exploring());
  REQUIRE(policy.inner() != nullptr);
  const ThetaEstimate& est = policy.estimated_theta();
  REQUIRE(est.theta.size() == 2);
  double max_theta = 0.0;
  for (double t : est.theta) {
    CHECK(t > 0.0);
    CHECK(t <= 1.0);
    max_theta = std::max(max_theta, t);
  }
  CHECK(max_theta == 1.0);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 2; ++k) CHECK(policy.inner()->stats().n(i, k) == 0);
  }
  policy.observe(first, ChoiceOutcome{kOutsideOption});
  CHECK(policy.inner()->stats().n(first.pairs()[0].product, first.pairs()[0].position) == 1);
}

TEST_CASE("exploration length rounds up") {
  const std::vector<double> r{0.5};
  CHECK(ExploreP2mlePolicy(1, 1, r, 1).exploration_rounds() == 1);
  CHECK(ExploreP2mlePolicy(1, 1, r, 100).exploration_rounds() == 1);
  CHECK(ExploreP2mlePolicy(1, 1, r, 101).exploration_rounds() == 2);
  CHECK(ExploreP2mlePolicy(1, 1, r, 10000, 0.5).exploration_rounds() == 50);
  CHECK_THROWS_AS(ExploreP2mlePolicy(1, 2, r, 100), std::invalid_argument);
  CHECK_THROWS_AS(ExploreP2mlePolicy(1, 1, r, 0), std::invalid_argument);
  CHECK_THROWS_AS(ExploreP2mlePolicy(1, 1, r, 100, 0.0), std::invalid_argument);
}

TEST_CASE("epoch policy repeats its placement until a no-purchase") {
  const Instance ex4 = example_instance(4);
  EpochUcbPolicy policy(5, 3, ex4.revenues(), EpochVariant::general);
  Rng rng(3);

  const Placement first = policy.select(rng);
  // First epoch is fully optimistic: same choice as the pairwise policy.
  CHECK(first == Placement({{0, 0}, {1, 1}, {2, 2}}, 5, 3));
  CHECK(policy.epoch_in_progress());
  CHECK(policy.completed_epochs() == 0);

  policy.observe(first, ChoiceOutcome{1});
  CHECK(policy.select(rng) == first);
  policy.observe(first, ChoiceOutcome{0});
  CHECK(policy.select(rng) == first);
  CHECK(policy.completed_epochs() == 0);

  policy.observe(first, ChoiceOutcome{kOutsideOption});
  CHECK(policy.completed_epochs() == 1);
  CHECK_FALSE(policy.epoch_in_progress());
  // The next select re-optimizes (and may or may not move).
  const Placement second = policy.select(rng);
  CHECK(second.size() == 3);
  CHECK(policy.epoch_in_progress());
}

TEST_CASE("multiplicative epoch variant opens like the product policy") {
  const Instance ex1 = example_instance(1);
  EpochUcbPolicy policy(3, 2, ex1.revenues(), EpochVariant::multiplicative_known_theta,
                        ex1.multiplicative()->theta);
  Rng rng(3);
  CHECK(policy.select(rng) == Placement({{0, 0}, {1, 1}}, 3, 2));
  CHECK(policy.name() == "epoch-ucb-v");

  // theta is mandatory for this variant and must have length K.
  CHECK_THROWS_AS(EpochUcbPolicy(3, 2, ex1.revenues(),
                                 EpochVariant::multiplicative_known_theta),
                  std::invalid_argument);
  CHECK_THROWS_AS(EpochUcbPolicy(3, 2, ex1.revenues(),
                                 EpochVariant::multiplicative_known_theta, {1.0}),
                  std::invalid_argument);
}

TEST_CASE("oracle attraction hook pins every policy to the offline optimum") {
  struct Case {
    const char* id;
    int example;
  };
  const Case cases[] = {{"p2mle", 1},        {"ep2mle", 1},       {"epoch-ucb-v", 1},
                        {"gp2", 4},          {"epoch-ucb-gen", 4}, {"gp2", 1},
                        {"epoch-ucb-gen", 1}};
  for (const Case& c : cases) {
    CAPTURE(c.id);
    CAPTURE(c.example);
    const Instance inst = example_instance(c.example);
    const long long horizon = 400;
    auto policy = make_policy(c.id, inst, horizon);
    policy->use_oracle_attractions(inst.attraction_matrix());
    const double best = dinkelbach_optimize(inst.revenues(), inst.attraction_matrix()).revenue;
    Rng rng(11);
    // The exploration-first policy still explores its prefix.
    const long long skip = std::string(c.id) == "ep2mle"
                               ? static_cast<long long>(std::ceil(0.1 * std::sqrt(horizon)))
                               : 0;
    for (long long t = 0; t < 40; ++t) {
      const Placement p = policy->select(rng);
      if (t >= skip) {
        CHECK(expected_revenue(inst, p) == doctest::Approx(best).epsilon(1e-12));
      }
      policy->observe(p, sample_choice(inst, p, rng));
    }
  }
}

TEST_CASE("policy factory covers every identifier") {
  const Instance ex1 = example_instance(1);
  const Instance ex4 = example_instance(4);
  CHECK(policy_ids() == std::vector<std::string>{"p2mle", "gp2", "ep2mle", "epoch-ucb-v",
                                                 "epoch-ucb-gen"});
  for (const std::string& id : policy_ids()) {
    auto policy = make_policy(id, ex1, 100);
    CHECK(policy->name() == id);
  }
  // General-model policies accept a general instance; the others refuse it.
  CHECK(make_policy("gp2", ex4, 100)->name() == "gp2");
  CHECK(make_policy("epoch-ucb-gen", ex4, 100)->name() == "epoch-ucb-gen");
  CHECK(make_policy("ep2mle", ex4, 100)->name() == "ep2mle");
  CHECK_THROWS_AS(make_policy("p2mle", ex4, 100), std::invalid_argument);
  CHECK_THROWS_AS(make_policy("epoch-ucb-v", ex4, 100), std::invalid_argument);
  CHECK_THROWS_AS(make_policy("ucb1", ex1, 100), std::invalid_argument);

  // The exploration constant flows through the options struct.
  PolicyOptions options;
  options.explore_c = 0.5;
  auto explorer = make_policy("ep2mle", ex1, 10000, options);
  CHECK(dynamic_cast<ExploreP2mlePolicy&>(*explorer).exploration_rounds() == 50);
}

TEST_CASE("optimizer tolerance setting is validated") {
  P2mleUcbPolicy policy = make_p2mle_ex1();
  policy.set_optimizer_epsilon(0.0);
  policy.set_optimizer_epsilon(0.25);
  CHECK_THROWS_AS(policy.set_optimizer_epsilon(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(policy.set_optimizer_epsilon(std::nan("")), std::invalid_argument);
}
