#include "fourway/config.hpp"

#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <json.hpp>

#include "fourway/error.hpp"

namespace fourway {

namespace {

using nlohmann::json;

json to_json(const toml::node& node) {
  if (const auto* table = node.as_table()) {
    json out = json::object();
    for (const auto& [key, value] : *table) out[std::string(key.str())] = to_json(value);
    return out;
  }
  if (const auto* array = node.as_array()) {
    json out = json::array();
    for (const auto& value : *array) out.push_back(to_json(value));
    return out;
  }
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  throw ValidationError("unsupported TOML value type (dates and times are not used)");
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError("unknown key '" + key + "' in [" + where + "]");
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("invalid value for '" + std::string(key) + "' in [" + where + "]");
  }
}

std::string as_code(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ValidationError("'" + key + "' must be a string or integer");
}

void apply_cause(const json& obj, CauseModelSpec& spec, const std::string& where) {
  if (obj.contains("time_df")) spec.time_df = get<int>(obj, "time_df", where);
  if (obj.contains("covariates")) spec.covariates = get<std::vector<std::string>>(obj, "covariates", where);
  if (obj.contains("treatment_time_interaction")) {
    spec.treatment_time_interaction = get<bool>(obj, "treatment_time_interaction", where);
  }
  if (obj.contains("ridge")) spec.ridge = get<double>(obj, "ridge", where);
  if (spec.time_df < 1) throw ValidationError("time_df must be at least 1 in [" + where + "]");
  if (!(spec.ridge >= 0.0)) throw ValidationError("ridge must be nonnegative in [" + where + "]");
}

ModelSpec parse_model(const json& obj) {
  if (!obj.is_object()) throw ValidationError("[model] must be a table");
  reject_unknown(obj, {"time_df", "covariates", "treatment_time_interaction", "ridge", "target", "competing"},
                 "model");
  CauseModelSpec base;
  apply_cause(obj, base, "model");
  ModelSpec spec = ModelSpec::both(base);
  for (const char* cause : {"target", "competing"}) {
    if (!obj.contains(cause)) continue;
    const json& sub = obj.at(cause);
    const std::string where = std::string("model.") + cause;
    if (!sub.is_object()) throw ValidationError("[" + where + "] must be a table");
    reject_unknown(sub, {"time_df", "covariates", "treatment_time_interaction", "ridge"}, where);
    apply_cause(sub, std::string(cause) == "target" ? spec.target : spec.competing, where);
  }
  return spec;
}

CsvSchema parse_schema(const json& obj) {
  if (!obj.is_object()) throw ValidationError("[data] must be a table");
  CsvSchema schema;
  for (const auto& [key, value] : obj.items()) {
    if (key == "grid") {
      schema.grid = get<std::vector<double>>(obj, "grid", "data");
    } else if (key == "covariates") {
      schema.covariates = get<std::vector<std::string>>(obj, "covariates", "data");
    } else {
      schema.apply(key + "=" + as_code(value, key));
    }
  }
  return schema;
}

std::vector<double> hazard_array(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ValidationError("missing '" + std::string(key) + "' in [" + where + "]");
  return get<std::vector<double>>(obj, key, where);
}

ScenarioSpec parse_scenario(const json& obj) {
  if (!obj.is_object()) throw ValidationError("[scenario] must be a table");
  reject_unknown(obj, {"preset", "stratified", "name", "grid", "strata", "n", "seed", "treatment_probability",
                       "censoring_hazard"},
                 "scenario");
  ScenarioSpec spec;
  if (obj.contains("preset")) {
    const bool stratified = obj.contains("stratified") && get<bool>(obj, "stratified", "scenario");
    spec = preset_scenario(get<std::string>(obj, "preset", "scenario"), stratified);
    if (obj.contains("grid") || obj.contains("strata")) {
      throw ValidationError("[scenario] takes either a preset or grid + strata, not both");
    }
  } else {
    if (!obj.contains("grid") || !obj.contains("strata")) {
      throw ValidationError("[scenario] needs a preset or both grid and strata");
    }
    spec.name = obj.contains("name") ? get<std::string>(obj, "name", "scenario") : "custom";
    spec.grid = get<std::vector<double>>(obj, "grid", "scenario");
    const json& strata = obj.at("strata");
    if (!strata.is_array()) throw ValidationError("scenario.strata must be an array of tables");
    for (std::size_t w = 0; w < strata.size(); ++w) {
      const json& s = strata[w];
      const std::string where = "scenario.strata." + std::to_string(w);
      reject_unknown(s, {"probability", "target_treated", "target_reference", "competing_treated",
                         "competing_reference"},
                     where);
      Stratum st;
      st.probability = s.contains("probability") ? get<double>(s, "probability", where) : 1.0;
      st.target_treated = hazard_array(s, "target_treated", where);
      st.target_reference = hazard_array(s, "target_reference", where);
      st.competing_treated = hazard_array(s, "competing_treated", where);
      st.competing_reference = hazard_array(s, "competing_reference", where);
      spec.strata.push_back(std::move(st));
    }
  }
  if (obj.contains("n")) {
    const auto n = get<long long>(obj, "n", "scenario");
    if (n < 0) throw ValidationError("scenario sample size n must be at least 1");
    spec.n = static_cast<std::size_t>(n);
  }
  if (obj.contains("seed")) spec.seed = get<std::uint64_t>(obj, "seed", "scenario");
  if (obj.contains("treatment_probability")) {
    spec.treatment_probability = get<double>(obj, "treatment_probability", "scenario");
  }
  if (obj.contains("censoring_hazard")) spec.censoring_hazard = get<double>(obj, "censoring_hazard", "scenario");
  return spec;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& format) {
  RunConfig cfg;
  cfg.text = text;
  cfg.format = format;
  json root;
  if (format == "json") {
    try {
      root = json::parse(text);
    } catch (const json::exception& e) {
      throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
  } else if (format == "toml") {
    try {
      root = to_json(toml::parse(text));
    } catch (const toml::parse_error& e) {
      std::ostringstream os;
      os << "config is not valid TOML: " << e.description() << " (line " << e.source().begin.line << ")";
      throw ValidationError(os.str());
    }
  } else {
    throw ValidationError("unknown config format: " + format);
  }
  if (!root.is_object()) throw ValidationError("config root must be a table");
  reject_unknown(root, {"model", "data", "scenario"}, "root");
  if (root.contains("model")) cfg.model = parse_model(root.at("model"));
  if (root.contains("data")) cfg.schema = parse_schema(root.at("data"));
  if (root.contains("scenario")) cfg.scenario = parse_scenario(root.at("scenario"));
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  return parse_config(os.str(), is_json ? "json" : "toml");
}

}  // namespace fourway
