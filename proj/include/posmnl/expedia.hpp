#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "posmnl/model.hpp"

namespace posmnl {

struct ImpressionRecord {
  long long prop_id = 0;
  int position = 1;  // display rank, 1-based
  bool click = false;
  bool randomized = false;
  double price = 0.0;
};

struct ImpressionColumns {
  std::string prop_id = "prop_id";
  std::string position = "position";
  std::string click = "click_bool";
  std::string randomized = "random_bool";
  std::string price = "price_usd";
};

struct LoadResult {
  std::vector<ImpressionRecord> records;
  long long skipped = 0;  // malformed data rows
  long long total_rows = 0;
};

// Reads a comma-separated file with a header row.  A missing required column
// is a schema error naming the column; rows that fail to parse or violate
// field invariants (position >= 1, click/random in {0,1}, finite price >= 0)
// are counted and skipped.
LoadResult load_impressions(const std::string& path, const ImpressionColumns& columns = {});

struct ExtractOptions {
  long long min_position_observations = 1000;
  long long min_item_observations = 1;
  double price_cap_quantile = 0.95;
  double v_floor = 0.01;
  int position_limit = 0;  // keep only the first K retained positions; 0 = all
};

struct PositionSummary {
  int rank = 1;  // original display rank
  long long impressions = 0;
  double ctr = 0.0;
};

struct ItemParams {
  long long id = 0;
  double v = 0.0;
  double r = 0.0;
  long long impressions = 0;
};

struct ExtractedParams {
  std::vector<double> theta;               // over retained positions; theta[0] = 1
  std::vector<PositionSummary> positions;  // retained positions, ascending rank
  std::vector<ItemParams> items;           // ascending id
  double price_cap = 0.0;
};

// Calibration from the randomized-display subset:
//   theta_k = (position-k mean click rate) / (position-1 mean click rate),
//     over positions meeting the observation threshold (sparse positions and
//     positions with zero clicks are dropped; rank 1 must survive);
//   v_i = (item mean click rate) / (max item mean click rate), floored;
//   r_i = min(item mean price, cap) / cap with cap the configured quantile
//     (nearest-rank) of item mean prices.
// Each impression row counts once in every average.
ExtractedParams extract_parameters(const std::vector<ImpressionRecord>& records,
                                   const ExtractOptions& options = {});

std::string params_to_json(const ExtractedParams& params);
void save_params(const ExtractedParams& params, const std::string& path);
ExtractedParams params_from_json(const std::string& text,
                                 const std::string& context = "params");
ExtractedParams load_params(const std::string& path);

// Multiplicative instance over a seeded uniform draw of N items with
// v >= min_v, using the first K retained positions.  The chosen items are
// re-sorted by id, so a pool of exactly N qualifying items yields the same
// instance for every seed.
Instance build_instance(const ExtractedParams& params, int num_products, int num_positions,
                        double min_v = 0.1, std::uint64_t seed = 0);

}  // namespace posmnl
