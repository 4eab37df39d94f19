#include "posmnl/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace posmnl {

namespace {

void check_row_shapes(std::span<const long long> n_row, std::span<const long long> w_row,
                      std::span<const double> theta) {
  if (n_row.size() != theta.size() || w_row.size() != theta.size()) {
    throw std::invalid_argument("stats rows and theta must have equal length");
  }
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (n_row[k] < 0 || w_row[k] < 0 || w_row[k] > n_row[k]) {
      throw std::invalid_argument("invalid counters at position " + std::to_string(k + 1));
    }
    if (!(theta[k] > 0.0 && theta[k] <= 1.0)) {
      throw std::invalid_argument("theta[" + std::to_string(k + 1) + "] outside (0,1]");
    }
  }
}

// Smallest integer m with 2^m >= x; requires x >= 1.  Uses the exponent bits
// directly so exact powers of two are not tipped over by log rounding.
int ceil_log2(double x) {
  if (!(x >= 1.0)) throw std::invalid_argument("ceil_log2 requires x >= 1");
  int m = std::ilogb(x);
  if (std::exp2(m) < x) ++m;
  return m;
}

}  // namespace

PairwiseStats::PairwiseStats(int num_products, int num_positions)
    : n_(num_products, num_positions), w_(num_products, num_positions) {
  if (num_products < 1 || num_positions < 1) {
    throw std::invalid_argument("stats need at least one product and one position");
  }
}

void PairwiseStats::record(const Placement& placement, ChoiceOutcome outcome) {
  if (outcome.is_outside()) {
    for (const auto& pp : placement.pairs()) ++n_(pp.product, pp.position);
    return;
  }
  const int position = placement.position_of(outcome.chosen);
  if (position < 0) {
    throw std::invalid_argument("outcome product " + std::to_string(outcome.chosen + 1) +
                                " was not displayed");
  }
  ++n_(outcome.chosen, position);
  ++w_(outcome.chosen, position);
}

double effective_exposure(std::span<const long long> n_row, std::span<const double> theta) {
  if (n_row.size() != theta.size()) {
    throw std::invalid_argument("stats row and theta must have equal length");
  }
  double d = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    d += static_cast<double>(n_row[k]) * theta[k];
  }
  return d;
}

double score(double v, std::span<const long long> n_row, std::span<const long long> w_row,
             std::span<const double> theta) {
  if (!(v >= 0.0)) throw std::invalid_argument("score requires v >= 0");
  check_row_shapes(n_row, w_row, theta);
  double s = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (n_row[k] == 0) continue;
    const double a = v * theta[k];
    s += static_cast<double>(w_row[k]) - static_cast<double>(n_row[k]) * a / (1.0 + a);
  }
  return s;
}

double score_root(std::span<const long long> n_row, std::span<const long long> w_row,
                  std::span<const double> theta) {
  check_row_shapes(n_row, w_row, theta);
  long long total_n = 0;
  long long total_w = 0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    total_n += n_row[k];
    total_w += w_row[k];
  }
  if (total_w == 0) return 0.0;
  if (total_w == total_n) return std::numeric_limits<double>::infinity();

  auto s = [&](double v) { return score(v, n_row, w_row, theta); };
  double lo = 0.0;
  double hi = 1.0;
  constexpr double kBracketCap = 1152921504606846976.0;  // 2^60
  while (s(hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kBracketCap) return std::numeric_limits<double>::infinity();
  }
  // Bisect well past the stated 1e-10 tolerance: the score slope can be as
  // large as the total observation count, and downstream checks want the
  // score at the root to vanish to ~1e-8 even then.
  for (int iter = 0; iter < 200 && (hi - lo) > std::max(1e-14, 1e-15 * hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (s(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double solve_clipped_mle(std::span<const long long> n_row, std::span<const long long> w_row,
                         std::span<const double> theta) {
  check_row_shapes(n_row, w_row, theta);
  if (!(effective_exposure(n_row, theta) > 0.0)) {
    throw std::invalid_argument("clipped MLE requires positive effective exposure");
  }
  return std::min(score_root(n_row, w_row, theta), 1.0);
}

double ucb_multiplicative(double v_hat, double effective_exposure, double ell) {
  if (!(v_hat >= 0.0)) throw std::invalid_argument("v_hat must be nonnegative");
  if (!(effective_exposure > 0.0)) {
    throw std::invalid_argument("confidence radius requires positive effective exposure");
  }
  if (!(ell > 0.0)) throw std::invalid_argument("ell must be positive");
  const double ratio = ell / effective_exposure;
  return v_hat + constants::C4 * std::sqrt(v_hat * ratio) + constants::C5 * ratio;
}

GeneralUcb ucb_general(long long n, long long w, double big_l) {
  if (n < 1) throw std::invalid_argument("per-pair confidence requires n >= 1");
  if (w < 0 || w > n) throw std::invalid_argument("w must lie in [0, n]");
  if (!(big_l > 0.0)) throw std::invalid_argument("L must be positive");
  const double p_hat = static_cast<double>(w) / static_cast<double>(n);
  const double dn = static_cast<double>(n);
  const double radius = 2.0 * std::sqrt(p_hat * (1.0 - p_hat) * big_l / dn) + 6.0 * big_l / dn;
  GeneralUcb out;
  out.p_ucb = std::min(p_hat + radius, 0.5);
  out.v_ucb = out.p_ucb / (1.0 - out.p_ucb);
  return out;
}

ConfidenceParams confidence_params(long long horizon, int num_products, int num_positions,
                                   ModelKind kind, double theta_min) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (num_products < 1) throw std::invalid_argument("need at least one product");
  if (num_positions < 1) throw std::invalid_argument("need at least one position");
  ConfidenceParams out;
  const double t = static_cast<double>(horizon);
  if (kind == ModelKind::multiplicative) {
    if (!(theta_min > 0.0 && theta_min <= 1.0)) {
      throw std::invalid_argument("theta_min outside (0,1]");
    }
    out.delta = 2.0 / (3.0 * num_products * t);
    out.c = 2.0 * (ceil_log2(t / theta_min) + 1);
    out.ell = std::log(out.c / out.delta);
  } else {
    out.delta = 2.0 / (3.0 * num_positions * num_products * t);
    out.big_l = std::log(2.0 * (ceil_log2(t) + 1) / out.delta);
  }
  return out;
}

}  // namespace posmnl
