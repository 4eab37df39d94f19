#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "posmnl/estimation.hpp"
#include "posmnl/grid.hpp"
#include "posmnl/model.hpp"
#include "posmnl/rng.hpp"

namespace posmnl {

// A bandit policy: alternating select/observe calls.  select is deterministic
// given internal state (plus the rng stream for the exploration policy);
// observe must receive exactly the placement the preceding select returned.
// Violations throw std::logic_error.
class Policy {
 public:
  virtual ~Policy() = default;

  Placement select(Rng& rng);
  void observe(const Placement& placement, ChoiceOutcome outcome);

  virtual std::string_view name() const = 0;

  // Debug hook: substitute the true attraction matrix for the upper
  // confidence values, making every select an offline optimum.
  void use_oracle_attractions(Grid<double> attractions);

  // Tolerance handed to the per-round optimizer; 0 keeps it exact.
  void set_optimizer_epsilon(double epsilon);

 protected:
  virtual Placement do_select(Rng& rng) = 0;
  virtual void do_observe(const Placement& placement, ChoiceOutcome outcome) = 0;
  const Grid<double>* oracle_attractions() const {
    return oracle_.has_value() ? &*oracle_ : nullptr;
  }
  double optimizer_epsilon() const { return optimizer_epsilon_; }

 private:
  bool awaiting_observe_ = false;
  Placement pending_;
  std::optional<Grid<double>> oracle_;
  double optimizer_epsilon_ = 0.0;
};

// Round-based policy for the multiplicative model with known position
// weights: per-product clipped pairwise MLE plus confidence radius, product
// set and positions re-optimized every round.
class P2mleUcbPolicy final : public Policy {
 public:
  P2mleUcbPolicy(std::vector<double> theta, std::vector<double> revenues, long long horizon);

  std::string_view name() const override { return "p2mle"; }
  const ConfidenceParams& params() const { return params_; }
  const PairwiseStats& stats() const { return stats_; }
  // Per-product upper confidence values as used by the most recent select
  // (all ones before the first select).
  const std::vector<double>& upper_confidence() const { return ucb_; }

 private:
  Placement do_select(Rng& rng) override;
  void do_observe(const Placement& placement, ChoiceOutcome outcome) override;
  void refresh(int product);

  std::vector<double> theta_;
  std::vector<double> revenues_;
  ConfidenceParams params_;
  PairwiseStats stats_;
  std::vector<double> ucb_;
};

// Round-based policy for the general model: independent per-pair win-rate
// confidence values, re-optimized every round.
class Gp2UcbPolicy final : public Policy {
 public:
  Gp2UcbPolicy(int num_products, int num_positions, std::vector<double> revenues,
               long long horizon);

  std::string_view name() const override { return "gp2"; }
  const ConfidenceParams& params() const { return params_; }
  const PairwiseStats& stats() const { return stats_; }
  const Grid<double>& upper_confidence() const { return ucb_; }

 private:
  Placement do_select(Rng& rng) override;
  void do_observe(const Placement& placement, ChoiceOutcome outcome) override;
  void refresh(int product, int position);

  std::vector<double> revenues_;
  ConfidenceParams params_;
  PairwiseStats stats_;
  Grid<double> ucb_;
};

struct ThetaEstimate {
  std::vector<double> theta;
  // False when the statistics carried no usable signal and theta defaulted
  // to all ones.
  bool from_data = false;
};

// Position-weight estimate from exploration statistics: per displayed pair,
// win rate clipped to [0,1/2] converted to odds min(p/(1-p), 1); column means
// over products with data, max-normalized.  Positions without data get 1.
// Normalized entries are floored at 0.01 so downstream consumers always see
// weights in (0,1].
ThetaEstimate estimate_theta(const PairwiseStats& stats);

// Exploration-first variant for unknown position weights: J0 = ceil(c*sqrt(T))
// rounds of uniformly random size-K placements, then a fresh P2MLE-UCB run
// using the estimated weights (exploration statistics are not carried over).
class ExploreP2mlePolicy final : public Policy {
 public:
  ExploreP2mlePolicy(int num_products, int num_positions, std::vector<double> revenues,
                     long long horizon, double explore_c = 0.1);

  std::string_view name() const override { return "ep2mle"; }
  long long exploration_rounds() const { return j0_; }
  bool exploring() const { return inner_ == nullptr; }
  // Valid once the exploitation phase has started.
  const ThetaEstimate& estimated_theta() const;
  const P2mleUcbPolicy* inner() const { return inner_.get(); }

 private:
  Placement do_select(Rng& rng) override;
  void do_observe(const Placement& placement, ChoiceOutcome outcome) override;

  int num_products_;
  int num_positions_;
  std::vector<double> revenues_;
  long long horizon_;
  long long j0_;
  long long rounds_selected_ = 0;
  PairwiseStats explore_stats_;
  ThetaEstimate theta_estimate_;
  std::unique_ptr<P2mleUcbPolicy> inner_;
};

enum class EpochVariant {
  multiplicative_known_theta,  // virtual item = product, known theta divided out
  general,                     // virtual item = (product, position) pair
};

// Epoch-based baseline: repeats a placement until a no-purchase outcome ends
// the epoch, then updates per-item averages (total picks / epochs offered)
// and re-optimizes with the standard epoch-UCB radius
//   vtilde + sqrt(vtilde*48*log(sqrt(NK)*l+1)/T_item) + 48*log(sqrt(NK)*l+1)/T_item
// clipped to [0,1]; unoffered items keep UCB 1.
class EpochUcbPolicy final : public Policy {
 public:
  EpochUcbPolicy(int num_products, int num_positions, std::vector<double> revenues,
                 EpochVariant variant, std::vector<double> theta = {});

  std::string_view name() const override {
    return variant_ == EpochVariant::general ? "epoch-ucb-gen" : "epoch-ucb-v";
  }
  long long completed_epochs() const { return completed_epochs_; }
  bool epoch_in_progress() const { return current_.has_value(); }

 private:
  Placement do_select(Rng& rng) override;
  void do_observe(const Placement& placement, ChoiceOutcome outcome) override;
  double item_ucb(double pick_mass, long long epochs_offered) const;
  Placement reoptimize() const;

  int num_products_;
  int num_positions_;
  std::vector<double> revenues_;
  EpochVariant variant_;
  std::vector<double> theta_;

  // Virtual-item statistics: indexed by pair for the general variant; only
  // column 0 is used for the multiplicative variant.
  Grid<double> pick_mass_;
  Grid<long long> epochs_offered_;
  Grid<long long> epoch_picks_;  // picks within the running epoch
  std::optional<Placement> current_;
  long long completed_epochs_ = 0;
};

struct PolicyOptions {
  double explore_c = 0.1;
};

// Builds a policy by CLI identifier: p2mle, gp2, ep2mle, epoch-ucb-v,
// epoch-ucb-gen.  The multiplicative-model policies (p2mle, epoch-ucb-v)
// require a multiplicative instance.
std::unique_ptr<Policy> make_policy(const std::string& id, const Instance& instance,
                                    long long horizon, const PolicyOptions& options = {});

const std::vector<std::string>& policy_ids();

}  // namespace posmnl
