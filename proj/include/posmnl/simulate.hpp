#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "posmnl/model.hpp"
#include "posmnl/policies.hpp"
#include "posmnl/rng.hpp"

namespace posmnl {

// The harness charges pseudo-regret: each round costs
//   R* - expected_revenue(instance, offered placement),
// the expected-revenue gap of the offered placement, not the difference of
// realized revenues.  Policies still learn from sampled choices only; the
// expectation enters the accounting, never the dynamics.

struct OracleOptimum {
  Placement placement;
  double revenue = 0.0;  // expected revenue of `placement`
};

// Offline optimum of the true attraction matrix (ratio iteration with zero
// tolerance), cross-checked against full enumeration whenever the instance
// fits the enumeration budget.
OracleOptimum oracle_optimum(const Instance& instance);

struct RegretTrace {
  OracleOptimum optimum;
  std::vector<double> instantaneous;  // one entry per round, >= -1e-9
  std::vector<double> cumulative;     // running sum of instantaneous
};

// Plays `policy` against `instance` for `horizon` rounds, drawing customer
// choices from `rng`.  The policy must be fresh (no prior select calls).
RegretTrace run_simulation(const Instance& instance, Policy& policy, long long horizon, Rng& rng);
RegretTrace run_simulation(const Instance& instance, Policy& policy, long long horizon, Rng& rng,
                           const OracleOptimum& optimum);

struct SimConfig {
  std::string instance_source;      // "ex1".."ex6" or a path to an instance file
  std::string policy_id;            // see policy_ids()
  long long horizon = 0;            // rounds per replication, >= 1
  int replications = 1;             // >= 1
  std::uint64_t master_seed = 1;    // replication j draws from derive_stream(seed, j)
  std::string output_path;          // empty -> standard output
  double dinkelbach_epsilon = 0.0;  // tolerance for the per-round optimizer
  long long stride = 0;             // emit every stride-th round; 0 -> auto
                                    // (1 when T <= 1e4, else T / 1e4)
  int threads = 1;                  // replications may run concurrently
  double explore_c = 0.1;           // exploration constant for ep2mle
  bool debug_same_stream = false;   // every replication reuses stream 0
};

// Parses a JSON object whose keys mirror the CLI flags: instance, policy,
// horizon, reps, seed, out, epsilon, stride, threads, explore-c,
// debug-same-stream.  Unknown keys and wrong types are errors.
SimConfig sim_config_from_json(const std::string& text);
SimConfig load_sim_config(const std::string& path);

// "ex1".."ex6" name the built-in examples; anything else is an instance file.
Instance resolve_instance(const std::string& source);

// Rounds at which the aggregated table is emitted: multiples of the stride
// plus always the final round.  stride 0 picks the default.
std::vector<long long> output_rounds(long long horizon, long long stride);

struct AggregatedRegret {
  std::vector<long long> rounds;  // ascending, last entry == horizon
  std::vector<double> mean;       // mean cumulative regret per sampled round
  std::vector<double> stddev;     // sample standard deviation, 0 when reps == 1
  int replications = 0;
};

// Runs config.replications independent simulations (replication j on the rng
// stream derive_stream(master_seed, j)) and aggregates them in replication
// order, so the result does not depend on the execution schedule.
AggregatedRegret run_replications(const SimConfig& config);

// CSV with header round,mean_cum_regret,std_cum_regret,reps; shortest
// round-trip number formatting, LF line endings.
std::string aggregated_to_csv(const AggregatedRegret& table);

// run_replications + CSV to config.output_path (standard output when empty).
AggregatedRegret simulate_to_file(const SimConfig& config);

}  // namespace posmnl
