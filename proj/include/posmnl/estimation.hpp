#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "posmnl/grid.hpp"
#include "posmnl/model.hpp"

namespace posmnl {

// Constants inherited from the confidence analysis.  Only C4 and C5 enter the
// decision path (the multiplicative-model confidence radius); the rest are
// exposed read-only for diagnostics.
namespace constants {
inline constexpr double C1 = 8.0;
inline constexpr double C2 = 8.0 / 3.0;
inline constexpr double C3 = 56.0 / 3.0;
inline constexpr double C4 = 2.0 * C1;
inline const double C5 = (200.0 + 32.0 * std::sqrt(6.0)) / 3.0;  // C1^2 + C2 + 2*C1*sqrt(C2)
inline const double C6 = 8.0 + 16.0 * std::sqrt(2.0);            // sqrt(2)*C4 + C1
inline const double C7 =
    (208.0 + 32.0 * std::sqrt(6.0) + 32.0 * std::sqrt(42.0)) / 3.0;  // C4*sqrt(C3) + C5 + C2
}  // namespace constants

// Pairwise product/position counters.  For each displayed pair (i,k):
//   n[i][k] counts rounds whose outcome was i itself or the outside option
//   w[i][k] counts rounds whose outcome was i itself
// A purchase of j only touches (j, position_of(j)); a no-purchase outcome
// touches every displayed pair.
class PairwiseStats {
 public:
  PairwiseStats(int num_products, int num_positions);

  void record(const Placement& placement, ChoiceOutcome outcome);

  int num_products() const { return n_.rows(); }
  int num_positions() const { return n_.cols(); }
  long long n(int product, int position) const { return n_(product, position); }
  long long w(int product, int position) const { return w_(product, position); }
  std::span<const long long> n_row(int product) const { return n_.row(product); }
  std::span<const long long> w_row(int product) const { return w_.row(product); }

 private:
  Grid<long long> n_;
  Grid<long long> w_;
};

// Position-weighted observation count D_i = sum_k n_{i,k} theta_k.
double effective_exposure(std::span<const long long> n_row, std::span<const double> theta);

// Pairwise pseudo-likelihood score
//   S(v) = sum_k ( w_k - n_k * v*theta_k / (1 + v*theta_k) ),
// strictly decreasing in v (whenever some n_k > 0).  Requires v >= 0.
double score(double v, std::span<const long long> n_row, std::span<const long long> w_row,
             std::span<const double> theta);

// Unique root of the score, unclipped.  Boundary cases: all w zero -> 0; all
// wins (sum w == sum n) or root beyond 2^60 -> +infinity.  Located by
// doubling the bracket from 1 and bisecting; absolute tolerance below 1e-10.
double score_root(std::span<const long long> n_row, std::span<const long long> w_row,
                  std::span<const double> theta);

// min(score_root, 1).  Requires positive effective exposure.
double solve_clipped_mle(std::span<const long long> n_row, std::span<const long long> w_row,
                         std::span<const double> theta);

// Upper confidence value for the multiplicative model:
//   v_hat + C4*sqrt(v_hat*ell/D) + C5*ell/D.
// Requires D > 0 and ell > 0.
double ucb_multiplicative(double v_hat, double effective_exposure, double ell);

struct GeneralUcb {
  double p_ucb = 0.0;
  double v_ucb = 0.0;
};

// Per-pair upper confidence for the general model from n displays and w wins:
//   p_ucb = min( w/n + 2*sqrt((w/n)(1-w/n)L/n) + 6L/n , 1/2 ),
//   v_ucb = p_ucb / (1 - p_ucb).
// Requires n >= 1, 0 <= w <= n, L > 0.
GeneralUcb ucb_general(long long n, long long w, double big_l);

struct ConfidenceParams {
  double delta = 0.0;  // failure probability budget
  double c = 0.0;      // peeling grid size (multiplicative model)
  double ell = 0.0;    // log(c/delta) (multiplicative model)
  double big_l = 0.0;  // log-term for per-pair confidence (general model)
};

// Multiplicative model: delta = 2/(3NT), c = 2*(ceil(log2(T/theta_min))+1),
// ell = log(c/delta).  General model: delta = 2/(3KNT),
// L = log(2*(ceil(log2 T)+1)/delta).  theta_min is required (and only used)
// for the multiplicative kind.
ConfidenceParams confidence_params(long long horizon, int num_products, int num_positions,
                                   ModelKind kind, double theta_min = 1.0);

}  // namespace posmnl
