#pragma once

#include <string>
#include <variant>
#include <vector>

#include "posmnl/grid.hpp"
#include "posmnl/rng.hpp"

namespace posmnl {

// Sentinel for the no-purchase outcome.  Product indices are 0-based
// internally; file formats and CLI output use 1-based products with 0 for
// the outside option.
inline constexpr int kOutsideOption = -1;

struct ProductPosition {
  int product = 0;   // 0-based
  int position = 0;  // 0-based

  friend bool operator==(const ProductPosition&, const ProductPosition&) = default;
  friend auto operator<=>(const ProductPosition&, const ProductPosition&) = default;
};

// A display decision: a set of at most K distinct products, each assigned a
// distinct position.  Pairs are kept sorted by product index so equal
// placements compare equal.
class Placement {
 public:
  Placement() = default;
  // Validates: products in [0, num_products), positions in [0, num_positions),
  // no repeated product or position.  Throws std::invalid_argument otherwise.
  Placement(std::vector<ProductPosition> pairs, int num_products, int num_positions);

  const std::vector<ProductPosition>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  bool contains_product(int product) const;
  // Position of `product`, or -1 if the product is not displayed.
  int position_of(int product) const;

  friend bool operator==(const Placement& a, const Placement& b) {
    return a.pairs_ == b.pairs_;
  }

 private:
  std::vector<ProductPosition> pairs_;
};

struct MultiplicativeModel {
  std::vector<double> v;      // per-product base attraction, in (0,1]
  std::vector<double> theta;  // per-position weight, in (0,1], max exactly 1
};

struct GeneralModel {
  Grid<double> attractions;  // N x K, entries in (0,1]
};

enum class ModelKind { multiplicative, general };

// Problem data: N products with revenues in [0,1], K positions, and either a
// multiplicative (v_i * theta_k) or a general per-pair attraction model.
class Instance {
 public:
  Instance(std::string name, std::vector<double> revenues, MultiplicativeModel model,
           int num_positions);
  Instance(std::string name, std::vector<double> revenues, GeneralModel model);

  const std::string& name() const { return name_; }
  int num_products() const { return num_products_; }
  int num_positions() const { return num_positions_; }
  const std::vector<double>& revenues() const { return revenues_; }

  ModelKind kind() const;
  // Non-null only for the matching model kind.
  const MultiplicativeModel* multiplicative() const;
  const GeneralModel* general() const;

  double attraction(int product, int position) const;
  Grid<double> attraction_matrix() const;
  // Smallest position weight; multiplicative model only.
  double theta_min() const;

 private:
  std::string name_;
  int num_products_ = 0;
  int num_positions_ = 0;
  std::vector<double> revenues_;
  std::variant<MultiplicativeModel, GeneralModel> model_;
};

struct ChoiceOutcome {
  int chosen = kOutsideOption;  // product index, or kOutsideOption

  bool is_outside() const { return chosen == kOutsideOption; }
  friend bool operator==(const ChoiceOutcome&, const ChoiceOutcome&) = default;
};

// Choice probabilities for one displayed placement.  by_pair is aligned with
// placement.pairs().
struct ChoiceDistribution {
  double outside = 1.0;
  std::vector<double> by_pair;
};

ChoiceDistribution choice_distribution(const Instance& instance, const Placement& placement);

double expected_revenue(const Instance& instance, const Placement& placement);

// Revenue of a placement under an explicit attraction matrix; used by the
// optimizer and by policies working with upper-confidence attractions.
double expected_revenue(const std::vector<double>& revenues, const Grid<double>& attractions,
                        const Placement& placement);

// Draws one customer choice.  Consumes exactly one uniform variate.
ChoiceOutcome sample_choice(const Instance& instance, const Placement& placement, Rng& rng);

}  // namespace posmnl
