#include "posmnl/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "json.hpp"
#include "posmnl/instance_io.hpp"
#include "posmnl/instances.hpp"
#include "posmnl/optimize.hpp"

namespace posmnl {

namespace {

constexpr double kCrossCheckTolerance = 1e-9;
constexpr long long kAutoStrideRows = 10000;

void check_config(const SimConfig& config) {
  if (config.instance_source.empty()) {
    throw std::invalid_argument("config: no instance source");
  }
  if (config.policy_id.empty()) throw std::invalid_argument("config: no policy id");
  if (config.horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
  if (config.replications < 1) throw std::invalid_argument("config: reps must be >= 1");
  if (config.stride < 0) throw std::invalid_argument("config: stride must be >= 0");
  if (config.threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  if (!(std::isfinite(config.dinkelbach_epsilon) && config.dinkelbach_epsilon >= 0.0)) {
    throw std::invalid_argument("config: epsilon must be finite and >= 0");
  }
  if (!(std::isfinite(config.explore_c) && config.explore_c > 0.0)) {
    throw std::invalid_argument("config: explore-c must be positive");
  }
}

}  // namespace

OracleOptimum oracle_optimum(const Instance& instance) {
  const OptimizationResult exact = dinkelbach_optimize(instance, 0.0);
  OracleOptimum optimum{exact.placement, expected_revenue(instance, exact.placement)};
  if (enumeration_size(instance.num_products(), instance.num_positions()) <=
      kEnumerationBudget) {
    const OptimizationResult reference = brute_force_optimize(instance);
    if (std::abs(reference.revenue - optimum.revenue) > kCrossCheckTolerance) {
      throw std::logic_error("optimum cross-check failed: ratio iteration found " +
                             std::to_string(optimum.revenue) + " but enumeration found " +
                             std::to_string(reference.revenue));
    }
  }
  return optimum;
}

RegretTrace run_simulation(const Instance& instance, Policy& policy, long long horizon,
                           Rng& rng) {
  return run_simulation(instance, policy, horizon, rng, oracle_optimum(instance));
}

RegretTrace run_simulation(const Instance& instance, Policy& policy, long long horizon, Rng& rng,
                           const OracleOptimum& optimum) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  RegretTrace trace;
  trace.optimum = optimum;
  trace.instantaneous.reserve(static_cast<std::size_t>(horizon));
  trace.cumulative.reserve(static_cast<std::size_t>(horizon));
  double cumulative = 0.0;
  for (long long t = 0; t < horizon; ++t) {
    const Placement placement = policy.select(rng);
    const ChoiceOutcome outcome = sample_choice(instance, placement, rng);
    policy.observe(placement, outcome);
    const double gap = optimum.revenue - expected_revenue(instance, placement);
    trace.instantaneous.push_back(gap);
    cumulative += gap;
    trace.cumulative.push_back(cumulative);
  }
  return trace;
}

Instance resolve_instance(const std::string& source) {
  if (source.size() == 3 && source[0] == 'e' && source[1] == 'x' && source[2] >= '1' &&
      source[2] <= '6') {
    return example_instance(source[2] - '0');
  }
  return load_instance(source);
}

std::vector<long long> output_rounds(long long horizon, long long stride) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (stride < 0) throw std::invalid_argument("stride must be >= 0");
  if (stride == 0) stride = horizon <= kAutoStrideRows ? 1 : horizon / kAutoStrideRows;
  std::vector<long long> rounds;
  rounds.reserve(static_cast<std::size_t>(horizon / stride) + 1);
  for (long long t = stride; t <= horizon; t += stride) rounds.push_back(t);
  if (rounds.empty() || rounds.back() != horizon) rounds.push_back(horizon);
  return rounds;
}

AggregatedRegret run_replications(const SimConfig& config) {
  check_config(config);
  const Instance instance = resolve_instance(config.instance_source);
  const OracleOptimum optimum = oracle_optimum(instance);
  const std::vector<long long> rounds = output_rounds(config.horizon, config.stride);

  const int reps = config.replications;
  std::vector<std::vector<double>> samples(static_cast<std::size_t>(reps));
  auto run_one = [&](int rep) {
    const std::uint64_t stream =
        config.debug_same_stream ? 0 : static_cast<std::uint64_t>(rep);
    Rng rng(derive_stream(config.master_seed, stream));
    PolicyOptions options;
    options.explore_c = config.explore_c;
    const auto policy = make_policy(config.policy_id, instance, config.horizon, options);
    policy->set_optimizer_epsilon(config.dinkelbach_epsilon);
    const RegretTrace trace = run_simulation(instance, *policy, config.horizon, rng, optimum);
    std::vector<double> row(rounds.size());
    for (std::size_t s = 0; s < rounds.size(); ++s) {
      row[s] = trace.cumulative[static_cast<std::size_t>(rounds[s] - 1)];
    }
    samples[static_cast<std::size_t>(rep)] = std::move(row);
  };

  const int workers = std::min<int>(config.threads, reps);
  if (workers == 1) {
    for (int rep = 0; rep < reps; ++rep) run_one(rep);
  } else {
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(reps));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int rep = w; rep < reps; rep += workers) {
          try {
            run_one(rep);
          } catch (...) {
            failures[static_cast<std::size_t>(rep)] = std::current_exception();
          }
        }
      });
    }
    for (auto& worker : pool) worker.join();
    for (const auto& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }
  }

  // Reductions run in replication order so the bytes cannot depend on the
  // execution schedule.
  AggregatedRegret table;
  table.rounds = rounds;
  table.replications = reps;
  table.mean.resize(rounds.size());
  table.stddev.resize(rounds.size());
  for (std::size_t s = 0; s < rounds.size(); ++s) {
    double sum = 0.0;
    for (int rep = 0; rep < reps; ++rep) sum += samples[static_cast<std::size_t>(rep)][s];
    const double mean = sum / reps;
    double squares = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const double gap = samples[static_cast<std::size_t>(rep)][s] - mean;
      squares += gap * gap;
    }
    table.mean[s] = mean;
    table.stddev[s] = reps > 1 ? std::sqrt(squares / (reps - 1)) : 0.0;
  }
  return table;
}

std::string aggregated_to_csv(const AggregatedRegret& table) {
  const std::size_t rows = table.rounds.size();
  if (table.mean.size() != rows || table.stddev.size() != rows) {
    throw std::logic_error("aggregated table columns have mismatched lengths");
  }
  std::string out = "round,mean_cum_regret,std_cum_regret,reps\n";
  char buf[32];
  const auto append_number = [&out, &buf](auto value) {
    const auto result = std::to_chars(buf, buf + sizeof buf, value);
    out.append(buf, result.ptr);
  };
  for (std::size_t s = 0; s < rows; ++s) {
    append_number(table.rounds[s]);
    out.push_back(',');
    append_number(table.mean[s]);
    out.push_back(',');
    append_number(table.stddev[s]);
    out.push_back(',');
    append_number(table.replications);
    out.push_back('\n');
  }
  return out;
}

AggregatedRegret simulate_to_file(const SimConfig& config) {
  AggregatedRegret table = run_replications(config);
  const std::string csv = aggregated_to_csv(table);
  if (config.output_path.empty()) {
    std::cout.write(csv.data(), static_cast<std::streamsize>(csv.size()));
    std::cout.flush();
  } else {
    std::ofstream out(config.output_path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot open output file \"" + config.output_path + "\"");
    }
    out.write(csv.data(), static_cast<std::streamsize>(csv.size()));
    out.flush();
    if (!out) throw std::runtime_error("failed writing \"" + config.output_path + "\"");
  }
  return table;
}

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& what) {
  throw std::runtime_error("config: " + what);
}

std::string take_string(const std::string& key, const json& value) {
  if (!value.is_string()) config_fail("\"" + key + "\" must be a string");
  return value.get<std::string>();
}

long long take_integer(const std::string& key, const json& value) {
  if (!value.is_number_integer()) config_fail("\"" + key + "\" must be an integer");
  return value.get<long long>();
}

std::uint64_t take_seed(const std::string& key, const json& value) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer() && value.get<long long>() >= 0) {
    return static_cast<std::uint64_t>(value.get<long long>());
  }
  config_fail("\"" + key + "\" must be a nonnegative integer");
}

double take_number(const std::string& key, const json& value) {
  if (!value.is_number()) config_fail("\"" + key + "\" must be a number");
  return value.get<double>();
}

bool take_bool(const std::string& key, const json& value) {
  if (!value.is_boolean()) config_fail("\"" + key + "\" must be a boolean");
  return value.get<bool>();
}

}  // namespace

SimConfig sim_config_from_json(const std::string& text) {
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::parse_error& e) {
    config_fail(e.what());
  }
  if (!parsed.is_object()) config_fail("top level must be a JSON object");
  SimConfig config;
  for (const auto& [key, value] : parsed.items()) {
    if (key == "instance") {
      config.instance_source = take_string(key, value);
    } else if (key == "policy") {
      config.policy_id = take_string(key, value);
    } else if (key == "horizon") {
      config.horizon = take_integer(key, value);
    } else if (key == "reps") {
      config.replications = static_cast<int>(take_integer(key, value));
    } else if (key == "seed") {
      config.master_seed = take_seed(key, value);
    } else if (key == "out") {
      config.output_path = take_string(key, value);
    } else if (key == "epsilon") {
      config.dinkelbach_epsilon = take_number(key, value);
    } else if (key == "stride") {
      config.stride = take_integer(key, value);
    } else if (key == "threads") {
      config.threads = static_cast<int>(take_integer(key, value));
    } else if (key == "explore-c") {
      config.explore_c = take_number(key, value);
    } else if (key == "debug-same-stream") {
      config.debug_same_stream = take_bool(key, value);
    } else {
      config_fail("unknown key \"" + key + "\"");
    }
  }
  return config;
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sim_config_from_json(buffer.str());
}

}  // namespace posmnl
