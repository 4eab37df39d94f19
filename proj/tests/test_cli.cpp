#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "posmnl/expedia.hpp"
#include "posmnl/instance_io.hpp"
#include "posmnl/instances.hpp"
#include "posmnl/simulate.hpp"
#include "support.hpp"

using namespace posmnl;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  const char* binary = std::getenv("POSMNL_CLI");
  REQUIRE_MESSAGE(binary != nullptr, "POSMNL_CLI must point at the built binary");
  const std::string out_path = "/tmp/posmnl_cli_stdout.txt";
  const std::string err_path = "/tmp/posmnl_cli_stderr.txt";
  const std::string command =
      std::string(binary) + " " + args + " >" + out_path + " 2>" + err_path;
  const int status = std::system(command.c_str());
  REQUIRE(WIFEXITED(status));
  CliResult result;
  result.code = WEXITSTATUS(status);
  result.out = testsupport::read_file(out_path);
  result.err = testsupport::read_file(err_path);
  return result;
}

}  // namespace

TEST_CASE("usage problems exit with code 2") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("optimize").code == 2);              // missing --instance
  CHECK(run_cli("optimize --bogus-flag x").code == 2);
  CHECK(run_cli("gen-instance --example 9").code == 2);  // out of range
  CHECK(run_cli("gen-instance --random --n 4 --k 2 --kind sideways --seed 1").code == 2);
  CHECK(run_cli("extract-params").code == 2);        // missing --input

  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("optimize --help").code == 0);
  CHECK(run_cli("simulate --help").code == 0);
}

TEST_CASE("optimize reports the static optimum") {
  const Instance unit("unit", {1.0}, MultiplicativeModel{{1.0}, {1.0}}, 1);
  const std::string path = "/tmp/posmnl_cli_unit.json";
  save_instance(unit, path);
  const CliResult result = run_cli("optimize --instance " + path);
  std::remove(path.c_str());
  CHECK(result.code == 0);
  CHECK(result.out ==
        "{\n"
        "  \"placement\": [\n"
        "    [\n"
        "      1,\n"
        "      1\n"
        "    ]\n"
        "  ],\n"
        "  \"revenue\": 0.5,\n"
        "  \"iterations\": 2\n"
        "}\n");

  const CliResult ex4 = run_cli("optimize --instance ex4");
  CHECK(ex4.code == 0);
  const nlohmann::json doc = nlohmann::json::parse(ex4.out);
  CHECK(doc["placement"] == nlohmann::json::array({{1, 1}, {2, 2}, {3, 3}}));
  CHECK(doc["revenue"].get<double>() == doctest::Approx(0.52).epsilon(1e-12));
  CHECK(doc["iterations"].get<int>() <= 10);
}

TEST_CASE("optimize failures are runtime errors") {
  const std::string path = testsupport::write_temp_file("posmnl_cli_broken.json", "{oops");
  const CliResult broken = run_cli("optimize --instance " + path);
  std::remove(path.c_str());
  CHECK(broken.code == 1);
  CHECK(broken.err.rfind("error: ", 0) == 0);

  CHECK(run_cli("optimize --instance /nonexistent/instance.json").code == 1);
  CHECK(run_cli("optimize --instance ex2 --epsilon -1").code == 1);
}

TEST_CASE("gen-instance emits the library generators byte for byte") {
  const CliResult example = run_cli("gen-instance --example 4");
  CHECK(example.code == 0);
  CHECK(example.out == instance_to_json(example_instance(4)));

  const std::string path = "/tmp/posmnl_cli_gen.json";
  const CliResult to_file = run_cli("gen-instance --example 4 --out " + path);
  CHECK(to_file.code == 0);
  CHECK(to_file.out.empty());
  CHECK(testsupport::read_file(path) == example.out);
  std::remove(path.c_str());

  const CliResult random = run_cli("gen-instance --random --n 4 --k 2 --kind general --seed 3");
  CHECK(random.code == 0);
  CHECK(random.out == instance_to_json(random_instance(4, 2, ModelKind::general, 3)));

  const CliResult hard = run_cli("gen-instance --hard --n 8 --k 2 --horizon 1000");
  CHECK(hard.code == 0);
  CHECK(hard.out == instance_to_json(hard_instance(8, 2, 1000).instance));
  CHECK(hard.err.find("epsilon: ") != std::string::npos);
  CHECK(hard.err.find("target: 1:1 2:2\n") != std::string::npos);
}

TEST_CASE("gen-instance mode selection is strict") {
  CHECK(run_cli("gen-instance").code == 2);
  CHECK(run_cli("gen-instance --example 2 --random --n 3 --k 1 --seed 0").code == 2);
  CHECK(run_cli("gen-instance --random --k 2 --seed 1").code == 2);  // missing --n
  CHECK(run_cli("gen-instance --random --n 4 --k 2").code == 2);     // missing --seed
  CHECK(run_cli("gen-instance --hard --n 8 --k 2").code == 2);       // missing --horizon
  // Feasibility failures inside the generator are runtime errors.
  CHECK(run_cli("gen-instance --random --n 2 --k 5 --seed 1").code == 1);
}

TEST_CASE("simulate prints the replication table") {
  SimConfig config;
  config.instance_source = "ex1";
  config.policy_id = "p2mle";
  config.horizon = 40;
  config.replications = 2;
  config.master_seed = 5;
  const std::string expected = aggregated_to_csv(run_replications(config));

  const CliResult direct =
      run_cli("simulate --instance ex1 --policy p2mle --horizon 40 --reps 2 --seed 5");
  CHECK(direct.code == 0);
  CHECK(direct.out == expected);
  CHECK(direct.err.empty());

  const std::string csv_path = "/tmp/posmnl_cli_table.csv";
  const CliResult to_file = run_cli(
      "simulate --instance ex1 --policy p2mle --horizon 40 --reps 2 --seed 5 --out " + csv_path);
  CHECK(to_file.code == 0);
  CHECK(to_file.out.empty());
  CHECK(to_file.err.find("wrote " + csv_path) != std::string::npos);
  CHECK(testsupport::read_file(csv_path) == expected);
  std::remove(csv_path.c_str());
}

TEST_CASE("simulate merges config files with flag overrides") {
  const std::string config_path = testsupport::write_temp_file(
      "posmnl_cli_config.json",
      R"({"instance":"ex1","policy":"p2mle","horizon":40,"reps":2,"seed":5})");

  SimConfig overridden;
  overridden.instance_source = "ex1";
  overridden.policy_id = "p2mle";
  overridden.horizon = 40;
  overridden.replications = 3;
  overridden.master_seed = 5;
  const std::string expected = aggregated_to_csv(run_replications(overridden));

  const CliResult result = run_cli("simulate --config " + config_path + " --reps 3");
  std::remove(config_path.c_str());
  CHECK(result.code == 0);
  CHECK(result.out == expected);
}

TEST_CASE("simulate rejects bad run configurations at runtime") {
  CHECK(run_cli("simulate --instance ex1 --policy ucb1 --horizon 10").code == 1);
  CHECK(run_cli("simulate --instance ex1 --horizon 10").code == 1);  // no policy
  CHECK(run_cli("simulate --instance ex4 --policy p2mle --horizon 10").code == 1);
  const CliResult nosim = run_cli("simulate --instance ex1 --policy p2mle");
  CHECK(nosim.code == 1);
  CHECK(nosim.err.find("horizon") != std::string::npos);
}

TEST_CASE("extract-params mirrors the library calibration") {
  const std::string csv_path =
      testsupport::write_temp_file("posmnl_cli_clicks.csv", testsupport::kImpressionFixture);
  const CliResult result = run_cli("extract-params --input " + csv_path +
                                   " --min-position-obs 1");
  CHECK(result.code == 0);

  const LoadResult loaded = load_impressions(csv_path);
  ExtractOptions options;
  options.min_position_observations = 1;
  CHECK(result.out == params_to_json(extract_parameters(loaded.records, options)));
  CHECK(result.err.find("rows: 12 (skipped 0)") != std::string::npos);
  CHECK(result.err.find("price cap: 500") != std::string::npos);

  // Column remapping failures name the missing column.
  const CliResult renamed = run_cli("extract-params --input " + csv_path +
                                    " --col-price cost_usd");
  CHECK(renamed.code == 1);
  CHECK(renamed.err.find("cost_usd") != std::string::npos);

  // The parameter file feeds gen-instance --from-params.
  const std::string params_path = "/tmp/posmnl_cli_params.json";
  const CliResult saved = run_cli("extract-params --input " + csv_path +
                                  " --min-position-obs 1 --out " + params_path);
  CHECK(saved.code == 0);
  const CliResult built = run_cli("gen-instance --from-params " + params_path +
                                  " --n 2 --k 2 --seed 0");
  CHECK(built.code == 0);
  const ExtractedParams params = load_params(params_path);
  CHECK(built.out == instance_to_json(build_instance(params, 2, 2, 0.1, 0)));
  std::remove(params_path.c_str());
  std::remove(csv_path.c_str());
}

TEST_CASE("selftest passes end to end") {
  const CliResult result = run_cli("selftest");
  CHECK(result.code == 0);
  CHECK(result.out.find("selftest passed") != std::string::npos);
  CHECK(result.out.find("[FAIL]") == std::string::npos);
}
