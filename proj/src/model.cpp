#include "posmnl/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace posmnl {

namespace {

void check_unit_interval(const std::vector<double>& values, const char* field,
                         bool exclude_zero) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = values[i];
    const bool ok = std::isfinite(x) && x <= 1.0 && (exclude_zero ? x > 0.0 : x >= 0.0);
    if (!ok) {
      throw std::invalid_argument(std::string(field) + "[" + std::to_string(i + 1) +
                                  "] = " + std::to_string(x) + " outside " +
                                  (exclude_zero ? "(0,1]" : "[0,1]"));
    }
  }
}

}  // namespace

Placement::Placement(std::vector<ProductPosition> pairs, int num_products, int num_positions)
    : pairs_(std::move(pairs)) {
  if (static_cast<int>(pairs_.size()) > num_positions) {
    throw std::invalid_argument("placement has " + std::to_string(pairs_.size()) +
                                " pairs but only " + std::to_string(num_positions) +
                                " positions exist");
  }
  std::sort(pairs_.begin(), pairs_.end());
  for (std::size_t idx = 0; idx < pairs_.size(); ++idx) {
    const auto [product, position] = pairs_[idx];
    if (product < 0 || product >= num_products) {
      throw std::invalid_argument("placement product " + std::to_string(product + 1) +
                                  " out of range 1.." + std::to_string(num_products));
    }
    if (position < 0 || position >= num_positions) {
      throw std::invalid_argument("placement position " + std::to_string(position + 1) +
                                  " out of range 1.." + std::to_string(num_positions));
    }
    if (idx > 0 && pairs_[idx - 1].product == product) {
      throw std::invalid_argument("placement repeats product " + std::to_string(product + 1));
    }
    for (std::size_t prev = 0; prev < idx; ++prev) {
      if (pairs_[prev].position == position) {
        throw std::invalid_argument("placement repeats position " +
                                    std::to_string(position + 1));
      }
    }
  }
}

bool Placement::contains_product(int product) const { return position_of(product) >= 0; }

int Placement::position_of(int product) const {
  for (const auto& pp : pairs_) {
    if (pp.product == product) return pp.position;
  }
  return -1;
}

Instance::Instance(std::string name, std::vector<double> revenues, MultiplicativeModel model,
                   int num_positions)
    : name_(std::move(name)),
      num_products_(static_cast<int>(revenues.size())),
      num_positions_(num_positions),
      revenues_(std::move(revenues)),
      model_(std::move(model)) {
  auto& m = std::get<MultiplicativeModel>(model_);
  if (num_products_ < 1) throw std::invalid_argument("instance needs at least one product");
  if (num_positions_ < 1) throw std::invalid_argument("instance needs at least one position");
  if (static_cast<int>(m.v.size()) != num_products_) {
    throw std::invalid_argument("v has " + std::to_string(m.v.size()) + " entries, expected " +
                                std::to_string(num_products_));
  }
  if (static_cast<int>(m.theta.size()) != num_positions_) {
    throw std::invalid_argument("theta has " + std::to_string(m.theta.size()) +
                                " entries, expected " + std::to_string(num_positions_));
  }
  check_unit_interval(revenues_, "revenues", /*exclude_zero=*/false);
  check_unit_interval(m.v, "v", /*exclude_zero=*/true);
  check_unit_interval(m.theta, "theta", /*exclude_zero=*/true);
  const double theta_max = *std::max_element(m.theta.begin(), m.theta.end());
  if (theta_max != 1.0) {
    throw std::invalid_argument("theta must be normalized with max entry exactly 1, got max " +
                                std::to_string(theta_max));
  }
}

Instance::Instance(std::string name, std::vector<double> revenues, GeneralModel model)
    : name_(std::move(name)),
      num_products_(static_cast<int>(revenues.size())),
      num_positions_(model.attractions.cols()),
      revenues_(std::move(revenues)),
      model_(std::move(model)) {
  auto& m = std::get<GeneralModel>(model_);
  if (num_products_ < 1) throw std::invalid_argument("instance needs at least one product");
  if (num_positions_ < 1) throw std::invalid_argument("instance needs at least one position");
  if (m.attractions.rows() != num_products_) {
    throw std::invalid_argument("V has " + std::to_string(m.attractions.rows()) +
                                " rows, expected " + std::to_string(num_products_));
  }
  check_unit_interval(revenues_, "revenues", /*exclude_zero=*/false);
  for (int i = 0; i < num_products_; ++i) {
    for (int k = 0; k < num_positions_; ++k) {
      const double x = m.attractions(i, k);
      if (!(std::isfinite(x) && x > 0.0 && x <= 1.0)) {
        throw std::invalid_argument("V[" + std::to_string(i + 1) + "][" +
                                    std::to_string(k + 1) + "] = " + std::to_string(x) +
                                    " outside (0,1]");
      }
    }
  }
}

ModelKind Instance::kind() const {
  return std::holds_alternative<MultiplicativeModel>(model_) ? ModelKind::multiplicative
                                                             : ModelKind::general;
}

const MultiplicativeModel* Instance::multiplicative() const {
  return std::get_if<MultiplicativeModel>(&model_);
}

const GeneralModel* Instance::general() const { return std::get_if<GeneralModel>(&model_); }

double Instance::attraction(int product, int position) const {
  if (product < 0 || product >= num_products_) {
    throw std::invalid_argument("product " + std::to_string(product + 1) + " out of range 1.." +
                                std::to_string(num_products_));
  }
  if (position < 0 || position >= num_positions_) {
    throw std::invalid_argument("position " + std::to_string(position + 1) +
                                " out of range 1.." + std::to_string(num_positions_));
  }
  if (const auto* m = multiplicative()) return m->v[product] * m->theta[position];
  return general()->attractions(product, position);
}

Grid<double> Instance::attraction_matrix() const {
  if (const auto* g = general()) return g->attractions;
  const auto& m = *multiplicative();
  Grid<double> out(num_products_, num_positions_);
  for (int i = 0; i < num_products_; ++i) {
    for (int k = 0; k < num_positions_; ++k) out(i, k) = m.v[i] * m.theta[k];
  }
  return out;
}

double Instance::theta_min() const {
  const auto* m = multiplicative();
  if (m == nullptr) {
    throw std::logic_error("theta_min is defined only for the multiplicative model");
  }
  return *std::min_element(m->theta.begin(), m->theta.end());
}

ChoiceDistribution choice_distribution(const Instance& instance, const Placement& placement) {
  ChoiceDistribution dist;
  dist.by_pair.reserve(placement.size());
  double total = 1.0;
  for (const auto& pp : placement.pairs()) {
    total += instance.attraction(pp.product, pp.position);
  }
  dist.outside = 1.0 / total;
  for (const auto& pp : placement.pairs()) {
    dist.by_pair.push_back(instance.attraction(pp.product, pp.position) / total);
  }
  return dist;
}

double expected_revenue(const Instance& instance, const Placement& placement) {
  double num = 0.0;
  double den = 1.0;
  for (const auto& pp : placement.pairs()) {
    const double a = instance.attraction(pp.product, pp.position);
    num += instance.revenues()[pp.product] * a;
    den += a;
  }
  return num / den;
}

double expected_revenue(const std::vector<double>& revenues, const Grid<double>& attractions,
                        const Placement& placement) {
  double num = 0.0;
  double den = 1.0;
  for (const auto& pp : placement.pairs()) {
    const double a = attractions(pp.product, pp.position);
    num += revenues[pp.product] * a;
    den += a;
  }
  return num / den;
}

ChoiceOutcome sample_choice(const Instance& instance, const Placement& placement, Rng& rng) {
  const ChoiceDistribution dist = choice_distribution(instance, placement);
  const double u = rng.next_double();
  double acc = dist.outside;
  if (u < acc) return ChoiceOutcome{kOutsideOption};
  const auto& pairs = placement.pairs();
  for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
    acc += dist.by_pair[idx];
    if (u < acc) return ChoiceOutcome{pairs[idx].product};
  }
  // Rounding can leave u just above the accumulated mass; attribute the
  // sliver to the last displayed product (mass error is at most a few ulps).
  return pairs.empty() ? ChoiceOutcome{kOutsideOption} : ChoiceOutcome{pairs.back().product};
}

}  // namespace posmnl
