#include "doctest.h"

#include "posg/experiment.hpp"
#include "posg/io.hpp"

#include <filesystem>
#include <sstream>

using namespace posg;

namespace {

const std::filesystem::path kData = POSG_TEST_DATA;

}  // namespace

TEST_CASE("vector and matrix round trips") {
  const VecD v = (VecD(3) << 1.5, -0.25, 1e-300).finished();
  CHECK(vector_from_json(to_json(v)) == v);
  MatD m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  CHECK(to_json(m)[0][2] == 3.0);
  CHECK(matrix_from_json(to_json(m)) == m);
  const WeightedSpace space((VecD(2) << 1.0, 0.5).finished(), 3.0);
  const WeightedSpace back = space_from_json(to_json(space));
  CHECK(back.weights() == space.weights());
  CHECK(back.p_exponent() == 3.0);
}

TEST_CASE("operator specs") {
  const auto op = operator_from_json(read_json_file(kData / "primitive3.json"));
  CHECK(op.space().dim() == 3);
  CHECK(is_markov(op));
  const auto round = operator_from_json(to_json(op));
  CHECK(materialize(round) == materialize(op));

  const Json transport = Json::parse(R"({"kind": "transport", "sigma": [1, 1, 0]})");
  const auto fp = operator_from_json(transport);
  CHECK(is_markov(fp));
  CHECK(adjoint_is_lattice_homomorphism(fp));

  CHECK_THROWS_AS(operator_from_json(Json::parse(R"({"kind": "dense", "matrix": [[1, -1], [0, 1]]})")),
                  InvalidArgument);
  CHECK_THROWS_AS(operator_from_json(Json::parse(R"({"kind": "mystery"})")), ConfigError);
}

TEST_CASE("config parsing rejects bad input") {
  CHECK_THROWS_AS(read_json_file(kData / "malformed_config.json"), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"instnace": "x"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"tol": -1})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"mode": "quad"})")), ConfigError);
  const auto c = config_from_json(read_json_file(kData / "example_4_3_config.json"));
  CHECK(c.instance == "example-4-3");
  CHECK(c.mode == "rational");
}

TEST_CASE("CSV writers") {
  std::ostringstream traces;
  write_traces_csv(traces, {{"residual", {{1.0, 0.5}, {2.0, 0.25}}}});
  CHECK(traces.str() == "t,quantity,value\n1,residual,0.5\n2,residual,0.25\n");
  std::ostringstream coo;
  write_coo_csv(coo, fp_of_finite_map({{0, 0}, WeightedSpace::counting(2)}));
  CHECK(coo.str().rfind("row,col,value\n", 0) == 0);
}

TEST_CASE("gallery run of example-4-3") {
  ExperimentConfig config;
  config.instance = "example-4-3";
  config.dim = 32;
  config.horizon = 24;
  const auto result = run_gallery(config);
  CHECK(result.exit_code == kExitOk);
  CHECK(result.report["strong"]["converged"] == false);
  CHECK(result.report.contains("individual_bound_e1"));
  CHECK(result.report["all_expectations_matched"] == true);
  CHECK(run_gallery(config).report.dump() == result.report.dump());
}

TEST_CASE("checker runs map verdicts to exit codes") {
  ExperimentConfig config;
  config.instance = (kData / "primitive3.json").string();
  config.checker = "lasota-yorke";
  CHECK(run_check(config).exit_code == kExitOk);
  config.checker = "ding";
  CHECK(run_check(config).exit_code == kExitInapplicable);
  CHECK(combine_exit_codes({0, 2, 1, 2}) == kExitViolation);
  CHECK(combine_exit_codes({0, 2}) == kExitInapplicable);
}
