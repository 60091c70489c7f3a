#include "fourway/config.hpp"
#include "fourway/error.hpp"
#include "support.hpp"

using namespace fourway;

TEST_SUITE("config") {

TEST_CASE("model section with per-cause overrides") {
  const RunConfig cfg = parse_config(R"(
[model]
time_df = 3
covariates = ["age", "hg"]
ridge = 0.5

[model.competing]
time_df = 2
treatment_time_interaction = true
)",
                                     "toml");
  REQUIRE(cfg.model);
  CHECK(cfg.model->target.time_df == 3);
  CHECK(cfg.model->target.covariates == std::vector<std::string>{"age", "hg"});
  CHECK(cfg.model->target.ridge == 0.5);
  CHECK_FALSE(cfg.model->target.treatment_time_interaction);
  CHECK(cfg.model->competing.time_df == 2);
  CHECK(cfg.model->competing.treatment_time_interaction);
  CHECK(cfg.model->competing.covariates == cfg.model->target.covariates);
  CHECK_FALSE(cfg.schema);
  CHECK_FALSE(cfg.scenario);
}

TEST_CASE("data section maps onto the CSV schema") {
  const RunConfig cfg = parse_config(R"(
[data]
time = "dtime"
event = "status"
target = "dead - prostatic ca"
competing = "*"
censored = "alive"
treated = 1
grid = [0, 12, 24.5]
covariates = ["age"]
)",
                                     "toml");
  REQUIRE(cfg.schema);
  CHECK(cfg.schema->time_column == "dtime");
  CHECK(cfg.schema->competing_code == "*");
  CHECK(cfg.schema->treated_value == "1");
  CHECK(cfg.schema->grid == std::vector<double>{0, 12, 24.5});
  CHECK(cfg.schema->covariates == std::vector<std::string>{"age"});
}

TEST_CASE("scenario from a preset or explicit strata") {
  const RunConfig preset = parse_config("[scenario]\npreset = \"scenario2\"\nstratified = true\nn = 50\nseed = 9\n", "toml");
  REQUIRE(preset.scenario);
  CHECK(preset.scenario->strata.size() == 2);
  CHECK(preset.scenario->n == 50);
  CHECK(preset.scenario->seed == 9);

  const RunConfig custom = parse_config(R"(
[scenario]
grid = [0, 1, 2]
censoring_hazard = 0.1
[[scenario.strata]]
target_treated = [0.1, 0.2]
target_reference = [0.2, 0.2]
competing_treated = [0.05, 0.05]
competing_reference = [0.1, 0.1]
)",
                                    "toml");
  REQUIRE(custom.scenario);
  CHECK(custom.scenario->intervals() == 2);
  CHECK(custom.scenario->strata[0].target_treated == std::vector<double>{0.1, 0.2});
  CHECK(custom.scenario->censoring_hazard == 0.1);
}

TEST_CASE("JSON uses the same layout") {
  const RunConfig cfg = parse_config(R"({"model": {"time_df": 2, "covariates": ["x"]}})", "json");
  REQUIRE(cfg.model);
  CHECK(cfg.model->competing.time_df == 2);
  CHECK(cfg.format == "json");
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(parse_config("[model\n", "toml"), ValidationError);
  CHECK_THROWS_AS(parse_config("[model]\ntime_df = \"three\"\n", "toml"), ValidationError);
  CHECK_THROWS_AS(parse_config("[model]\ntime_df = 0\n", "toml"), ValidationError);
  CHECK_THROWS_AS(parse_config("[model]\nknots = 3\n", "toml"), ValidationError);
  CHECK_THROWS_AS(parse_config("[modle]\n", "toml"), ValidationError);
  CHECK_THROWS_AS(parse_config("[data]\nshape = \"round\"\n", "toml"), ValidationError);
  CHECK_THROWS_AS(parse_config("[scenario]\npreset = \"nope\"\n", "toml"), ValidationError);
  CHECK_THROWS_AS(parse_config("{", "json"), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.toml"), ValidationError);
}

}
