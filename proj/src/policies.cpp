#include "posmnl/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "posmnl/optimize.hpp"

namespace posmnl {

Placement Policy::select(Rng& rng) {
  if (awaiting_observe_) {
    throw std::logic_error("select called again before observe");
  }
  pending_ = do_select(rng);
  awaiting_observe_ = true;
  return pending_;
}

void Policy::observe(const Placement& placement, ChoiceOutcome outcome) {
  if (!awaiting_observe_) {
    throw std::logic_error("observe called before select");
  }
  if (!(placement == pending_)) {
    throw std::logic_error("observe called with a placement select did not return");
  }
  if (!outcome.is_outside() && !placement.contains_product(outcome.chosen)) {
    throw std::logic_error("outcome names a product that was not displayed");
  }
  do_observe(placement, outcome);
  awaiting_observe_ = false;
}

void Policy::use_oracle_attractions(Grid<double> attractions) {
  oracle_ = std::move(attractions);
}

void Policy::set_optimizer_epsilon(double epsilon) {
  if (!(std::isfinite(epsilon) && epsilon >= 0.0)) {
    throw std::invalid_argument("optimizer epsilon must be finite and >= 0");
  }
  optimizer_epsilon_ = epsilon;
}

namespace {

void check_revenues(const std::vector<double>& revenues) {
  for (std::size_t i = 0; i < revenues.size(); ++i) {
    if (!(std::isfinite(revenues[i]) && revenues[i] >= 0.0 && revenues[i] <= 1.0)) {
      throw std::invalid_argument("revenues[" + std::to_string(i + 1) + "] outside [0,1]");
    }
  }
}

void check_theta(const std::vector<double>& theta) {
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (!(std::isfinite(theta[k]) && theta[k] > 0.0 && theta[k] <= 1.0)) {
      throw std::invalid_argument("theta[" + std::to_string(k + 1) + "] outside (0,1]");
    }
  }
}

}  // namespace

P2mleUcbPolicy::P2mleUcbPolicy(std::vector<double> theta, std::vector<double> revenues,
                               long long horizon)
    : theta_(std::move(theta)),
      revenues_(std::move(revenues)),
      params_(confidence_params(horizon, static_cast<int>(revenues_.size()),
                                static_cast<int>(theta_.size()), ModelKind::multiplicative,
                                theta_.empty() ? 1.0
                                               : *std::min_element(theta_.begin(), theta_.end()))),
      stats_(static_cast<int>(revenues_.size()), static_cast<int>(theta_.size())),
      ucb_(revenues_.size(), 1.0) {
  check_revenues(revenues_);
  check_theta(theta_);
}

Placement P2mleUcbPolicy::do_select(Rng&) {
  const int n = static_cast<int>(revenues_.size());
  const int k = static_cast<int>(theta_.size());
  Grid<double> attractions(n, k);
  if (const auto* oracle = oracle_attractions()) {
    attractions = *oracle;
  } else {
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < k; ++c) attractions(i, c) = ucb_[i] * theta_[c];
    }
  }
  return dinkelbach_optimize(revenues_, attractions, optimizer_epsilon()).placement;
}

void P2mleUcbPolicy::do_observe(const Placement& placement, ChoiceOutcome outcome) {
  stats_.record(placement, outcome);
  if (outcome.is_outside()) {
    for (const auto& pp : placement.pairs()) refresh(pp.product);
  } else {
    refresh(outcome.chosen);
  }
}

void P2mleUcbPolicy::refresh(int product) {
  const double d = effective_exposure(stats_.n_row(product), theta_);
  if (d > 0.0) {
    const double v_hat = solve_clipped_mle(stats_.n_row(product), stats_.w_row(product), theta_);
    ucb_[product] = ucb_multiplicative(v_hat, d, params_.ell);
  } else {
    ucb_[product] = 1.0;
  }
}

Gp2UcbPolicy::Gp2UcbPolicy(int num_products, int num_positions, std::vector<double> revenues,
                           long long horizon)
    : revenues_(std::move(revenues)),
      params_(confidence_params(horizon, num_products, num_positions, ModelKind::general)),
      stats_(num_products, num_positions),
      ucb_(num_products, num_positions, 1.0) {
  if (static_cast<int>(revenues_.size()) != num_products) {
    throw std::invalid_argument("revenues size does not match N");
  }
  check_revenues(revenues_);
}

Placement Gp2UcbPolicy::do_select(Rng&) {
  if (const auto* oracle = oracle_attractions()) {
    return dinkelbach_optimize(revenues_, *oracle, optimizer_epsilon()).placement;
  }
  return dinkelbach_optimize(revenues_, ucb_, optimizer_epsilon()).placement;
}

void Gp2UcbPolicy::do_observe(const Placement& placement, ChoiceOutcome outcome) {
  stats_.record(placement, outcome);
  if (outcome.is_outside()) {
    for (const auto& pp : placement.pairs()) refresh(pp.product, pp.position);
  } else {
    refresh(outcome.chosen, placement.position_of(outcome.chosen));
  }
}

void Gp2UcbPolicy::refresh(int product, int position) {
  const long long n = stats_.n(product, position);
  if (n > 0) {
    ucb_(product, position) = ucb_general(n, stats_.w(product, position), params_.big_l).v_ucb;
  } else {
    ucb_(product, position) = 1.0;
  }
}

ThetaEstimate estimate_theta(const PairwiseStats& stats) {
  const int n = stats.num_products();
  const int k = stats.num_positions();
  ThetaEstimate out;
  out.theta.assign(k, 1.0);

  std::vector<double> column_mean(k, 0.0);
  std::vector<int> column_count(k, 0);
  for (int c = 0; c < k; ++c) {
    for (int i = 0; i < n; ++i) {
      if (stats.n(i, c) == 0) continue;
      double p = static_cast<double>(stats.w(i, c)) / static_cast<double>(stats.n(i, c));
      p = std::clamp(p, 0.0, 0.5);
      column_mean[c] += std::min(p / (1.0 - p), 1.0);
      ++column_count[c];
    }
    if (column_count[c] > 0) column_mean[c] /= column_count[c];
  }

  const double max_mean = *std::max_element(column_mean.begin(), column_mean.end());
  if (!(max_mean > 0.0)) {
    // No usable signal anywhere (including the all-empty case): fall back to
    // uniform weights and flag it.
    out.from_data = false;
    return out;
  }
  for (int c = 0; c < k; ++c) {
    if (column_count[c] > 0) {
      out.theta[c] = std::max(column_mean[c] / max_mean, 0.01);
    }
  }
  out.from_data = true;
  return out;
}

ExploreP2mlePolicy::ExploreP2mlePolicy(int num_products, int num_positions,
                                       std::vector<double> revenues, long long horizon,
                                       double explore_c)
    : num_products_(num_products),
      num_positions_(num_positions),
      revenues_(std::move(revenues)),
      horizon_(horizon),
      j0_(static_cast<long long>(
          std::ceil(explore_c * std::sqrt(static_cast<double>(horizon))))),
      explore_stats_(num_products, num_positions) {
  if (num_positions_ > num_products_) {
    throw std::invalid_argument("exploration requires K <= N (got N=" +
                                std::to_string(num_products_) + ", K=" +
                                std::to_string(num_positions_) + ")");
  }
  if (static_cast<int>(revenues_.size()) != num_products_) {
    throw std::invalid_argument("revenues size does not match N");
  }
  check_revenues(revenues_);
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (!(explore_c > 0.0)) throw std::invalid_argument("explore_c must be positive");
}

const ThetaEstimate& ExploreP2mlePolicy::estimated_theta() const {
  if (inner_ == nullptr) {
    throw std::logic_error("theta estimate is available only after the exploration phase");
  }
  return theta_estimate_;
}

Placement ExploreP2mlePolicy::do_select(Rng& rng) {
  ++rounds_selected_;
  if (rounds_selected_ <= j0_) {
    // Uniform size-K subset with a uniform bijection: a partial Fisher-Yates
    // draw gives a uniform ordered K-tuple; entry c goes to position c.
    std::vector<int> products(num_products_);
    std::iota(products.begin(), products.end(), 0);
    std::vector<ProductPosition> pairs(num_positions_);
    for (int c = 0; c < num_positions_; ++c) {
      const auto j =
          c + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(num_products_ - c)));
      std::swap(products[c], products[j]);
      pairs[c] = {products[c], c};
    }
    return Placement(std::move(pairs), num_products_, num_positions_);
  }
  if (inner_ == nullptr) {
    theta_estimate_ = estimate_theta(explore_stats_);
    inner_ = std::make_unique<P2mleUcbPolicy>(theta_estimate_.theta, revenues_, horizon_);
    if (const auto* oracle = oracle_attractions()) inner_->use_oracle_attractions(*oracle);
    inner_->set_optimizer_epsilon(optimizer_epsilon());
  }
  return inner_->select(rng);
}

void ExploreP2mlePolicy::do_observe(const Placement& placement, ChoiceOutcome outcome) {
  if (inner_ == nullptr) {
    explore_stats_.record(placement, outcome);
  } else {
    inner_->observe(placement, outcome);
  }
}

EpochUcbPolicy::EpochUcbPolicy(int num_products, int num_positions, std::vector<double> revenues,
                               EpochVariant variant, std::vector<double> theta)
    : num_products_(num_products),
      num_positions_(num_positions),
      revenues_(std::move(revenues)),
      variant_(variant),
      theta_(std::move(theta)),
      pick_mass_(num_products, variant == EpochVariant::general ? num_positions : 1),
      epochs_offered_(num_products, variant == EpochVariant::general ? num_positions : 1),
      epoch_picks_(num_products, num_positions) {
  if (num_products_ < 1 || num_positions_ < 1) {
    throw std::invalid_argument("need at least one product and one position");
  }
  if (static_cast<int>(revenues_.size()) != num_products_) {
    throw std::invalid_argument("revenues size does not match N");
  }
  check_revenues(revenues_);
  if (variant_ == EpochVariant::multiplicative_known_theta) {
    if (static_cast<int>(theta_.size()) != num_positions_) {
      throw std::invalid_argument("multiplicative variant requires theta of length K");
    }
    check_theta(theta_);
  }
}

double EpochUcbPolicy::item_ucb(double pick_mass, long long epochs_offered) const {
  if (epochs_offered == 0) return 1.0;
  const double v_tilde = pick_mass / static_cast<double>(epochs_offered);
  const double log_term =
      48.0 *
      std::log(std::sqrt(static_cast<double>(num_products_) * num_positions_) *
                   static_cast<double>(completed_epochs_) +
               1.0) /
      static_cast<double>(epochs_offered);
  const double ucb = v_tilde + std::sqrt(v_tilde * log_term) + log_term;
  return std::clamp(ucb, 0.0, 1.0);
}

Placement EpochUcbPolicy::reoptimize() const {
  if (const auto* oracle = oracle_attractions()) {
    return dinkelbach_optimize(revenues_, *oracle, optimizer_epsilon()).placement;
  }
  Grid<double> attractions(num_products_, num_positions_);
  for (int i = 0; i < num_products_; ++i) {
    if (variant_ == EpochVariant::general) {
      for (int c = 0; c < num_positions_; ++c) {
        attractions(i, c) = item_ucb(pick_mass_(i, c), epochs_offered_(i, c));
      }
    } else {
      const double product_ucb = item_ucb(pick_mass_(i, 0), epochs_offered_(i, 0));
      for (int c = 0; c < num_positions_; ++c) attractions(i, c) = product_ucb * theta_[c];
    }
  }
  return dinkelbach_optimize(revenues_, attractions, optimizer_epsilon()).placement;
}

Placement EpochUcbPolicy::do_select(Rng&) {
  if (!current_.has_value()) current_ = reoptimize();
  return *current_;
}

void EpochUcbPolicy::do_observe(const Placement& placement, ChoiceOutcome outcome) {
  if (!outcome.is_outside()) {
    ++epoch_picks_(outcome.chosen, placement.position_of(outcome.chosen));
    return;
  }
  // A no-purchase outcome closes the epoch: fold the epoch's picks into the
  // per-item averages and force a re-optimization at the next select.
  for (const auto& pp : placement.pairs()) {
    const long long picks = epoch_picks_(pp.product, pp.position);
    epoch_picks_(pp.product, pp.position) = 0;
    if (variant_ == EpochVariant::general) {
      pick_mass_(pp.product, pp.position) += static_cast<double>(picks);
      ++epochs_offered_(pp.product, pp.position);
    } else {
      pick_mass_(pp.product, 0) += static_cast<double>(picks) / theta_[pp.position];
      ++epochs_offered_(pp.product, 0);
    }
  }
  ++completed_epochs_;
  current_.reset();
}

std::unique_ptr<Policy> make_policy(const std::string& id, const Instance& instance,
                                    long long horizon, const PolicyOptions& options) {
  const int n = instance.num_products();
  const int k = instance.num_positions();
  auto require_multiplicative = [&]() -> const MultiplicativeModel& {
    const auto* m = instance.multiplicative();
    if (m == nullptr) {
      throw std::invalid_argument("policy \"" + id +
                                  "\" needs known position weights and requires a "
                                  "multiplicative-model instance");
    }
    return *m;
  };
  if (id == "p2mle") {
    return std::make_unique<P2mleUcbPolicy>(require_multiplicative().theta, instance.revenues(),
                                            horizon);
  }
  if (id == "gp2") {
    return std::make_unique<Gp2UcbPolicy>(n, k, instance.revenues(), horizon);
  }
  if (id == "ep2mle") {
    return std::make_unique<ExploreP2mlePolicy>(n, k, instance.revenues(), horizon,
                                                options.explore_c);
  }
  if (id == "epoch-ucb-v") {
    return std::make_unique<EpochUcbPolicy>(n, k, instance.revenues(),
                                            EpochVariant::multiplicative_known_theta,
                                            require_multiplicative().theta);
  }
  if (id == "epoch-ucb-gen") {
    return std::make_unique<EpochUcbPolicy>(n, k, instance.revenues(), EpochVariant::general);
  }
  throw std::invalid_argument("unknown policy \"" + id +
                              "\" (expected p2mle, gp2, ep2mle, epoch-ucb-v, or epoch-ucb-gen)");
}

const std::vector<std::string>& policy_ids() {
  static const std::vector<std::string> ids = {"p2mle", "gp2", "ep2mle", "epoch-ucb-v",
                                               "epoch-ucb-gen"};
  return ids;
}

}  // namespace posmnl
