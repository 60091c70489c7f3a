#pragma once

#include <optional>
#include <string>

#include "fourway/dataio.hpp"
#include "fourway/hazards.hpp"
#include "fourway/sim.hpp"

namespace fourway {

// Parsed run configuration. TOML by default; a `.json` file is read as JSON
// with the same layout:
//
//   [model]                 # shared by both hazard models
//   time_df = 3
//   covariates = ["age"]
//   treatment_time_interaction = true
//   ridge = 0.0
//   [model.target]          # optional per-cause overrides
//   [model.competing]
//
//   [data]                  # CSV schema, see CsvSchema
//   time = "dtime"
//   grid = [0, 6, 12]
//
//   [scenario]              # simulation world
//   preset = "scenario1"    # or grid + [[scenario.strata]] tables
//   n = 10000
//   seed = 1
struct RunConfig {
  std::string text;    // verbatim file contents
  std::string format;  // "toml" or "json"
  std::optional<ModelSpec> model;
  std::optional<CsvSchema> schema;
  std::optional<ScenarioSpec> scenario;
};

// Throws ValidationError on unreadable files, syntax errors and bad values.
RunConfig parse_config(const std::string& text, const std::string& format);
RunConfig load_config(const std::string& path);

}  // namespace fourway
