#include "posmnl/expedia.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "posmnl/rng.hpp"

namespace posmnl {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (const char ch : line) {
    if (ch == ',') {
      fields.push_back(current);
      current.clear();
    } else if (ch != '\r') {
      current += ch;
    }
  }
  fields.push_back(current);
  for (std::string& f : fields) {
    const auto begin = f.find_first_not_of(" \t\"");
    const auto end = f.find_last_not_of(" \t\"");
    f = begin == std::string::npos ? std::string() : f.substr(begin, end - begin + 1);
  }
  return fields;
}

bool parse_ll(const std::string& s, long long& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !s.empty();
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !s.empty();
}

struct Aggregate {
  long long impressions = 0;
  long long clicks = 0;
  double price_sum = 0.0;

  double ctr() const { return static_cast<double>(clicks) / static_cast<double>(impressions); }
};

// Nearest-rank quantile of an ascending-sorted sample.
double nearest_rank_quantile(const std::vector<double>& sorted, double q) {
  const auto m = static_cast<long long>(sorted.size());
  long long rank = static_cast<long long>(std::ceil(q * static_cast<double>(m)));
  rank = std::clamp(rank, 1LL, m);
  return sorted[static_cast<std::size_t>(rank - 1)];
}

}  // namespace

LoadResult load_impressions(const std::string& path, const ImpressionColumns& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file, expected a header");
  const std::vector<std::string> header = split_csv_line(line);
  auto column_index = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw std::runtime_error(path + ": missing required column \"" + name + "\"");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t idx_prop = column_index(columns.prop_id);
  const std::size_t idx_pos = column_index(columns.position);
  const std::size_t idx_click = column_index(columns.click);
  const std::size_t idx_rand = column_index(columns.randomized);
  const std::size_t idx_price = column_index(columns.price);
  const std::size_t needed =
      1 + std::max({idx_prop, idx_pos, idx_click, idx_rand, idx_price});

  LoadResult result;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++result.total_rows;
    const std::vector<std::string> fields = split_csv_line(line);
    ImpressionRecord rec;
    long long position = 0;
    long long click = 0;
    long long randomized = 0;
    const bool ok = fields.size() >= needed && parse_ll(fields[idx_prop], rec.prop_id) &&
                    parse_ll(fields[idx_pos], position) && position >= 1 &&
                    position <= 1000000 && parse_ll(fields[idx_click], click) &&
                    (click == 0 || click == 1) && parse_ll(fields[idx_rand], randomized) &&
                    (randomized == 0 || randomized == 1) &&
                    parse_double(fields[idx_price], rec.price) && std::isfinite(rec.price) &&
                    rec.price >= 0.0;
    if (!ok) {
      ++result.skipped;
      continue;
    }
    rec.position = static_cast<int>(position);
    rec.click = click == 1;
    rec.randomized = randomized == 1;
    result.records.push_back(rec);
  }
  return result;
}

ExtractedParams extract_parameters(const std::vector<ImpressionRecord>& records,
                                   const ExtractOptions& options) {
  if (!(options.price_cap_quantile > 0.0 && options.price_cap_quantile <= 1.0)) {
    throw std::invalid_argument("price cap quantile must lie in (0,1]");
  }
  std::map<int, Aggregate> by_position;
  std::map<long long, Aggregate> by_item;
  for (const ImpressionRecord& rec : records) {
    if (!rec.randomized) continue;
    Aggregate& pos = by_position[rec.position];
    ++pos.impressions;
    pos.clicks += rec.click ? 1 : 0;
    Aggregate& item = by_item[rec.prop_id];
    ++item.impressions;
    item.clicks += rec.click ? 1 : 0;
    item.price_sum += rec.price;
  }
  if (by_position.empty()) {
    throw std::runtime_error("no randomized impressions: cannot calibrate parameters");
  }

  ExtractedParams out;
  // Positions: sparse or click-free ranks carry no usable ratio signal and
  // are dropped before anything else.
  for (const auto& [rank, agg] : by_position) {
    if (agg.impressions < options.min_position_observations || agg.clicks == 0) continue;
    out.positions.push_back({rank, agg.impressions, agg.ctr()});
  }
  if (out.positions.empty() || out.positions.front().rank != 1) {
    throw std::runtime_error(
        "position 1 is absent or below the observation threshold: cannot normalize position "
        "effects");
  }
  if (options.position_limit > 0 &&
      static_cast<int>(out.positions.size()) > options.position_limit) {
    out.positions.resize(static_cast<std::size_t>(options.position_limit));
  }
  const double top_ctr = out.positions.front().ctr;
  out.theta.reserve(out.positions.size());
  for (const PositionSummary& p : out.positions) {
    out.theta.push_back(std::min(p.ctr / top_ctr, 1.0));
  }
  out.theta.front() = 1.0;

  // Items.
  double max_ctr = 0.0;
  for (const auto& [id, agg] : by_item) {
    if (agg.impressions < options.min_item_observations) continue;
    max_ctr = std::max(max_ctr, agg.ctr());
  }
  if (!(max_ctr > 0.0)) {
    throw std::runtime_error("no clicks among retained items: cannot normalize attractions");
  }
  std::vector<double> mean_prices;
  for (const auto& [id, agg] : by_item) {
    if (agg.impressions < options.min_item_observations) continue;
    mean_prices.push_back(agg.price_sum / static_cast<double>(agg.impressions));
  }
  std::sort(mean_prices.begin(), mean_prices.end());
  out.price_cap = nearest_rank_quantile(mean_prices, options.price_cap_quantile);
  if (!(out.price_cap > 0.0)) {
    throw std::runtime_error("price cap is zero: item prices carry no scale");
  }
  for (const auto& [id, agg] : by_item) {
    if (agg.impressions < options.min_item_observations) continue;
    ItemParams item;
    item.id = id;
    item.impressions = agg.impressions;
    item.v = std::max(agg.ctr() / max_ctr, options.v_floor);
    const double mean_price = agg.price_sum / static_cast<double>(agg.impressions);
    item.r = std::min(mean_price, out.price_cap) / out.price_cap;
    out.items.push_back(item);
  }
  return out;
}

namespace {

using ordered_json = nlohmann::ordered_json;

}  // namespace

std::string params_to_json(const ExtractedParams& params) {
  ordered_json j;
  j["theta"] = params.theta;
  ordered_json positions = ordered_json::array();
  for (const PositionSummary& p : params.positions) {
    positions.push_back({{"rank", p.rank}, {"impressions", p.impressions}, {"ctr", p.ctr}});
  }
  j["positions"] = std::move(positions);
  ordered_json items = ordered_json::array();
  for (const ItemParams& item : params.items) {
    items.push_back({{"id", item.id},
                     {"v", item.v},
                     {"r", item.r},
                     {"impressions", item.impressions}});
  }
  j["items"] = std::move(items);
  j["price_cap"] = params.price_cap;
  return j.dump(2) + "\n";
}

void save_params(const ExtractedParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << params_to_json(params);
  if (!out) throw std::runtime_error("failed writing " + path);
}

ExtractedParams params_from_json(const std::string& text, const std::string& context) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw std::runtime_error(context + ": malformed JSON: " + e.what());
  }
  auto fail = [&](const std::string& what) -> void {
    throw std::runtime_error(context + ": " + what);
  };
  if (!j.is_object()) fail("top level must be an object");
  for (const char* key : {"theta", "positions", "items", "price_cap"}) {
    if (!j.contains(key)) fail(std::string("missing field \"") + key + "\"");
  }
  ExtractedParams out;
  if (!j["theta"].is_array()) fail("theta must be an array");
  for (const auto& x : j["theta"]) {
    if (!x.is_number()) fail("theta entries must be numbers");
    out.theta.push_back(x.get<double>());
  }
  if (!j["positions"].is_array()) fail("positions must be an array");
  for (const auto& p : j["positions"]) {
    PositionSummary ps;
    ps.rank = p.at("rank").get<int>();
    ps.impressions = p.at("impressions").get<long long>();
    ps.ctr = p.at("ctr").get<double>();
    out.positions.push_back(ps);
  }
  if (!j["items"].is_array()) fail("items must be an array");
  for (const auto& it : j["items"]) {
    ItemParams item;
    item.id = it.at("id").get<long long>();
    item.v = it.at("v").get<double>();
    item.r = it.at("r").get<double>();
    item.impressions = it.at("impressions").get<long long>();
    out.items.push_back(item);
  }
  if (!j["price_cap"].is_number()) fail("price_cap must be a number");
  out.price_cap = j["price_cap"].get<double>();
  if (out.theta.size() != out.positions.size()) {
    fail("theta and positions must have equal length");
  }
  if (out.theta.empty()) fail("theta must be nonempty");
  return out;
}

ExtractedParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return params_from_json(buf.str(), path);
}

Instance build_instance(const ExtractedParams& params, int num_products, int num_positions,
                        double min_v, std::uint64_t seed) {
  if (num_products < 1) throw std::invalid_argument("N must be at least 1");
  if (num_positions < 1) throw std::invalid_argument("K must be at least 1");
  if (num_positions > static_cast<int>(params.theta.size())) {
    throw std::invalid_argument("K=" + std::to_string(num_positions) + " exceeds the " +
                                std::to_string(params.theta.size()) + " retained positions");
  }
  std::vector<const ItemParams*> pool;
  for (const ItemParams& item : params.items) {
    if (item.v >= min_v) pool.push_back(&item);
  }
  if (static_cast<int>(pool.size()) < num_products) {
    throw std::invalid_argument("only " + std::to_string(pool.size()) + " of " +
                                std::to_string(params.items.size()) + " items have v >= " +
                                std::to_string(min_v) + "; need N=" +
                                std::to_string(num_products));
  }
  std::sort(pool.begin(), pool.end(),
            [](const ItemParams* a, const ItemParams* b) { return a->id < b->id; });
  Rng rng(seed);
  for (std::size_t i = 0; i + 1 < pool.size(); ++i) {
    const auto j = i + rng.next_below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(num_products));
  std::sort(pool.begin(), pool.end(),
            [](const ItemParams* a, const ItemParams* b) { return a->id < b->id; });

  std::vector<double> revenues, v;
  revenues.reserve(pool.size());
  v.reserve(pool.size());
  for (const ItemParams* item : pool) {
    revenues.push_back(item->r);
    v.push_back(item->v);
  }
  std::vector<double> theta(params.theta.begin(), params.theta.begin() + num_positions);
  const std::string name = "expedia-n" + std::to_string(num_products) + "-k" +
                           std::to_string(num_positions) + "-seed" + std::to_string(seed);
  return Instance(name, std::move(revenues), MultiplicativeModel{std::move(v), std::move(theta)},
                  num_positions);
}

}  // namespace posmnl
