#include <charconv>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "posmnl/expedia.hpp"
#include "posmnl/instance_io.hpp"
#include "posmnl/instances.hpp"
#include "posmnl/optimize.hpp"
#include "posmnl/selftest.hpp"
#include "posmnl/simulate.hpp"

namespace {

using namespace posmnl;

std::string fmt(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

// 1-based "product:position" pairs, e.g. "1:2 3:1".
std::string placement_string(const Placement& placement) {
  if (placement.empty()) return "(empty)";
  std::string out;
  for (const auto& pp : placement.pairs()) {
    if (!out.empty()) out.push_back(' ');
    out += std::to_string(pp.product + 1) + ":" + std::to_string(pp.position + 1);
  }
  return out;
}

void emit_instance(const Instance& instance, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << instance_to_json(instance);
  } else {
    save_instance(instance, out_path);
  }
}

int usage_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 2;
}

struct GenArgs {
  int example = 0;
  bool random = false;
  bool hard = false;
  std::string from_params;
  int n = 0;
  int k = 0;
  std::string kind = "multiplicative";
  std::uint64_t seed = 0;
  bool seed_given = false;
  long long horizon = 0;
  double min_v = 0.1;
  std::string out;
};

int run_gen_instance(const GenArgs& args) {
  const int modes = (args.example != 0) + args.random + args.hard + !args.from_params.empty();
  if (modes != 1) {
    return usage_error(
        "gen-instance needs exactly one of --example, --random, --hard, --from-params");
  }
  if (args.example != 0) {
    emit_instance(example_instance(args.example), args.out);
    return 0;
  }
  if (args.random) {
    if (args.n < 1 || args.k < 1) return usage_error("--random requires --n and --k");
    const auto kind =
        args.kind == "general" ? ModelKind::general : ModelKind::multiplicative;
    emit_instance(random_instance(args.n, args.k, kind, args.seed), args.out);
    return 0;
  }
  if (args.hard) {
    if (args.n < 1 || args.k < 1 || args.horizon < 1) {
      return usage_error("--hard requires --n, --k and --horizon");
    }
    std::optional<std::uint64_t> target_seed;
    if (args.seed_given) target_seed = args.seed;
    const HardInstance hard = hard_instance(args.n, args.k, args.horizon, {}, target_seed);
    emit_instance(hard.instance, args.out);
    std::cerr << "epsilon: " << fmt(hard.epsilon) << "\n"
              << "target: " << placement_string(hard.target) << "\n";
    return 0;
  }
  if (args.n < 1 || args.k < 1) return usage_error("--from-params requires --n and --k");
  const ExtractedParams params = load_params(args.from_params);
  emit_instance(build_instance(params, args.n, args.k, args.min_v, args.seed), args.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assortment-and-position bandit toolkit for position-weighted MNL choice"};
  app.require_subcommand(1);

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Static optimum of an instance");
  std::string opt_instance;
  double opt_epsilon = 0.0;
  optimize->add_option("--instance", opt_instance, "ex1..ex6 or an instance file")->required();
  optimize->add_option("--epsilon", opt_epsilon, "Ratio-iteration tolerance (default exact)");

  // gen-instance
  auto* gen = app.add_subcommand("gen-instance", "Generate an instance file");
  GenArgs gen_args;
  gen->add_option("--example", gen_args.example, "Built-in example id")->check(CLI::Range(1, 6));
  gen->add_flag("--random", gen_args.random, "Seeded random instance (--n --k --kind --seed)");
  gen->add_flag("--hard", gen_args.hard,
                "Lower-bound instance (--n --k --horizon, --seed for a random target)");
  gen->add_option("--from-params", gen_args.from_params,
                  "Build from extracted parameters (--n --k, optional --min-v --seed)");
  gen->add_option("--n", gen_args.n, "Number of products");
  gen->add_option("--k", gen_args.k, "Number of positions");
  gen->add_option("--kind", gen_args.kind, "Model kind for --random")
      ->check(CLI::IsMember({"multiplicative", "general"}));
  auto* gen_seed = gen->add_option("--seed", gen_args.seed, "Seed");
  gen->add_option("--horizon", gen_args.horizon, "Horizon the hard instance is tuned for");
  gen->add_option("--min-v", gen_args.min_v, "Minimum item attraction for --from-params");
  gen->add_option("--out", gen_args.out, "Output file (default standard output)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run replications and write the regret CSV");
  std::string sim_config_path;
  SimConfig sim;
  simulate->add_option("--config", sim_config_path, "JSON config; explicit flags override it");
  auto* f_instance = simulate->add_option("--instance", sim.instance_source,
                                          "ex1..ex6 or an instance file");
  auto* f_policy = simulate->add_option("--policy", sim.policy_id,
                                        "p2mle, gp2, ep2mle, epoch-ucb-v or epoch-ucb-gen");
  auto* f_horizon = simulate->add_option("--horizon", sim.horizon, "Rounds per replication");
  auto* f_reps = simulate->add_option("--reps", sim.replications, "Replication count");
  auto* f_seed = simulate->add_option("--seed", sim.master_seed, "Master seed");
  auto* f_out = simulate->add_option("--out", sim.output_path,
                                     "CSV path (default standard output)");
  auto* f_epsilon = simulate->add_option("--epsilon", sim.dinkelbach_epsilon,
                                         "Per-round optimizer tolerance");
  auto* f_stride = simulate->add_option("--stride", sim.stride,
                                        "Emit every stride-th round (0 = auto)");
  auto* f_threads = simulate->add_option("--threads", sim.threads, "Concurrent replications");
  auto* f_explore = simulate->add_option("--explore-c", sim.explore_c,
                                         "Exploration constant for ep2mle");
  auto* f_same = simulate->add_flag("--debug-same-stream", sim.debug_same_stream,
                                    "Give every replication the same rng stream");

  // extract-params
  auto* extract = app.add_subcommand("extract-params",
                                     "Calibrate parameters from a click-log CSV");
  std::string ex_input;
  std::string ex_out;
  ImpressionColumns columns;
  ExtractOptions ex_options;
  extract->add_option("--input", ex_input, "Click-log CSV")->required();
  extract->add_option("--out", ex_out, "Parameter file (default standard output)");
  extract->add_option("--col-id", columns.prop_id, "Item id column");
  extract->add_option("--col-position", columns.position, "Display rank column");
  extract->add_option("--col-click", columns.click, "Click indicator column");
  extract->add_option("--col-random", columns.randomized, "Randomized-display indicator column");
  extract->add_option("--col-price", columns.price, "Price column");
  extract->add_option("--min-position-obs", ex_options.min_position_observations,
                      "Impressions a position needs to be retained");
  extract->add_option("--min-item-obs", ex_options.min_item_observations,
                      "Impressions an item needs to be retained");
  extract->add_option("--price-cap-quantile", ex_options.price_cap_quantile,
                      "Quantile of item mean prices used as the revenue cap");
  extract->add_option("--v-floor", ex_options.v_floor, "Lower bound on item attractions");
  extract->add_option("--position-limit", ex_options.position_limit,
                      "Keep only the first K retained positions (0 = all)");

  // selftest
  app.add_subcommand("selftest", "Run the built-in diagnostic suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*optimize) {
      const Instance instance = resolve_instance(opt_instance);
      const OptimizationResult result = dinkelbach_optimize(instance, opt_epsilon);
      nlohmann::ordered_json doc;
      doc["placement"] = nlohmann::ordered_json::array();
      for (const auto& pp : result.placement.pairs()) {
        doc["placement"].push_back({pp.product + 1, pp.position + 1});
      }
      doc["revenue"] = result.revenue;
      doc["iterations"] = result.iterations;
      std::cout << doc.dump(2) << "\n";
      return 0;
    }
    if (*gen) {
      if (gen_args.random && gen_seed->count() == 0) {
        return usage_error("--random requires --seed");
      }
      gen_args.seed_given = gen_seed->count() > 0;
      return run_gen_instance(gen_args);
    }
    if (*simulate) {
      SimConfig config;
      if (!sim_config_path.empty()) config = load_sim_config(sim_config_path);
      if (f_instance->count()) config.instance_source = sim.instance_source;
      if (f_policy->count()) config.policy_id = sim.policy_id;
      if (f_horizon->count()) config.horizon = sim.horizon;
      if (f_reps->count()) config.replications = sim.replications;
      if (f_seed->count()) config.master_seed = sim.master_seed;
      if (f_out->count()) config.output_path = sim.output_path;
      if (f_epsilon->count()) config.dinkelbach_epsilon = sim.dinkelbach_epsilon;
      if (f_stride->count()) config.stride = sim.stride;
      if (f_threads->count()) config.threads = sim.threads;
      if (f_explore->count()) config.explore_c = sim.explore_c;
      if (f_same->count()) config.debug_same_stream = sim.debug_same_stream;
      const AggregatedRegret table = simulate_to_file(config);
      if (!config.output_path.empty()) {
        std::cerr << "wrote " << config.output_path << ": " << table.rounds.size()
                  << " rows, " << table.replications << " replications\n";
      }
      return 0;
    }
    if (*extract) {
      const LoadResult loaded = load_impressions(ex_input, columns);
      const ExtractedParams params = extract_parameters(loaded.records, ex_options);
      if (ex_out.empty()) {
        std::cout << params_to_json(params);
      } else {
        save_params(params, ex_out);
      }
      std::cerr << "rows: " << loaded.total_rows << " (skipped " << loaded.skipped << ")\n"
                << "positions kept: " << params.positions.size() << "\n"
                << "items kept: " << params.items.size() << "\n"
                << "price cap: " << fmt(params.price_cap) << "\n";
      return 0;
    }
    // selftest
    return run_selftest(std::cout) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
