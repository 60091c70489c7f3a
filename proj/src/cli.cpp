#include "fourway/cli.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fourway/boot.hpp"
#include "fourway/config.hpp"
#include "fourway/error.hpp"
#include "fourway/pipeline.hpp"
#include "fourway/sim.hpp"
#include "fourway/verify.hpp"

namespace fourway {

namespace {

namespace fs = std::filesystem;
using Manifest = nlohmann::ordered_json;

// Shortest representation that round-trips.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(std::string("cannot open ") + what + ": " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << bytes;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Digest of everything but the timestamp, then the timestamp itself.
std::string finish_manifest(Manifest m) {
  m["content_sha256"] = sha256_hex(m.dump());
  m["created_utc"] = utc_now();
  return m.dump(2) + "\n";
}

// "0,6,12" or "start:stop:step" (inclusive of stop when it lands on the step).
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) throw ValidationError("invalid grid value '" + s + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(number(item));
    if (parts.size() != 3 || !(parts[2] > 0.0) || !(parts[1] > parts[0])) {
      throw ValidationError("grid range must be start:stop:step with stop > start and step > 0");
    }
    const auto steps = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long i = 0; i <= steps; ++i) grid.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return grid;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) grid.push_back(number(item));
  return grid;
}

Manifest cause_spec_json(const CauseModelSpec& s) {
  return {{"time_df", s.time_df},
          {"covariates", s.covariates},
          {"treatment_time_interaction", s.treatment_time_interaction},
          {"ridge", s.ridge}};
}

Manifest fit_json(const HazardModel& m, const Cohort& cohort) {
  std::vector<double> coef(m.fit.coefficients.data(), m.fit.coefficients.data() + m.fit.coefficients.size());
  return {{"knots", m.basis.knots()},
          {"labels", m.labels(cohort)},
          {"coefficients", coef},
          {"converged", m.fit.converged},
          {"iterations", m.fit.iterations},
          {"deviance", m.fit.deviance},
          {"max_abs_score", m.fit.max_abs_score},
          {"person_periods", m.rows},
          {"events", m.events}};
}

std::string components_csv(const DecompositionCurve& curve, const BootstrapBands* bands) {
  std::ostringstream os;
  os << "k,t_k,component,scale,estimate,lower,upper\r\n";
  for (Scale scale : {Scale::Risk, Scale::Rmst}) {
    for (int k = 1; k <= curve.intervals(); ++k) {
      for (Component c : kAllComponents) {
        os << k << ',' << num(curve.grid[static_cast<std::size_t>(k)]) << ',' << component_name(c) << ','
           << scale_name(scale) << ',' << num(curve.value(scale, c, k)) << ',';
        if (bands) os << num(bands->lower(scale, c, k)) << ',' << num(bands->upper(scale, c, k));
        else os << ',';
        os << "\r\n";
      }
    }
  }
  return os.str();
}

// One row per (k, scale) with a column per component.
std::string wide_csv(const DecompositionCurve& curve) {
  std::ostringstream os;
  os << "k,t_k,scale";
  for (Component c : kAllComponents) os << ',' << component_name(c);
  os << "\r\n";
  for (Scale scale : {Scale::Risk, Scale::Rmst}) {
    for (int k = 1; k <= curve.intervals(); ++k) {
      os << k << ',' << num(curve.grid[static_cast<std::size_t>(k)]) << ',' << scale_name(scale);
      for (Component c : kAllComponents) os << ',' << num(curve.value(scale, c, k));
      os << "\r\n";
    }
  }
  return os.str();
}

struct DecomposeArgs {
  std::string input, config, grid, out_dir = ".";
  std::vector<std::string> schema;
  int boot = 0;
  std::uint64_t seed = 1;
  double level = 0.95;
  double ridge = -1.0;
  unsigned threads = 0;
};

int cmd_decompose(const DecomposeArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_config(a.config);
  ModelSpec spec = cfg.model.value_or(ModelSpec::both(CauseModelSpec{}));
  if (a.ridge >= 0.0) spec.target.ridge = spec.competing.ridge = a.ridge;

  CsvSchema schema = cfg.schema.value_or(CsvSchema{});
  for (const auto& kv : a.schema) schema.apply(kv);
  if (!a.grid.empty()) schema.grid = parse_grid(a.grid);
  if (schema.covariates.empty()) {
    for (const auto* s : {&spec.target, &spec.competing}) {
      for (const auto& name : s->covariates) {
        if (std::find(schema.covariates.begin(), schema.covariates.end(), name) == schema.covariates.end()) {
          schema.covariates.push_back(name);
        }
      }
    }
  }

  const std::string bytes = read_file(a.input, "input");
  std::istringstream in(bytes);
  const Cohort cohort = read_csv(in, schema);
  const Estimate est = estimate_decomposition(cohort, spec);

  BootstrapPlan plan;
  plan.replicates = a.boot;
  plan.seed = a.seed;
  plan.level = a.level;
  plan.threads = a.threads;
  std::optional<BootstrapBands> bands;
  if (a.boot > 0) {
    bands = bootstrap_curves(cohort, spec, plan);
  } else if (a.boot < 0) {
    throw ValidationError("--boot must be nonnegative");
  } else if (!(a.level > 0.0 && a.level < 1.0)) {
    throw ValidationError("confidence level must lie in (0,1)");
  }

  for (const HazardModel* m : {&est.fits.target, &est.fits.competing}) {
    if (!m->fit.converged) {
      err << "warning: " << (m->cause == Cause::Target ? "target" : "competing")
          << " hazard fit did not converge (max |score| " << m->fit.max_abs_score << ")\n";
    }
  }

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  const std::string components = components_csv(est.curve, bands ? &*bands : nullptr);
  write_file(dir / "components.csv", components);

  Manifest m;
  m["tool"] = "fourway";
  m["version"] = kToolVersion;
  m["command"] = "decompose";
  m["config"] = {{"path", a.config}, {"format", cfg.format}, {"sha256", sha256_hex(cfg.text)}, {"text", cfg.text}};
  m["input"] = {{"path", a.input}, {"sha256", sha256_hex(bytes)}, {"subjects", cohort.size()}};
  m["schema_overrides"] = a.schema;
  m["grid"] = cohort.grid;
  m["covariates"] = cohort.covariate_names;
  m["model"] = {{"target", cause_spec_json(spec.target)}, {"competing", cause_spec_json(spec.competing)}};
  m["fits"] = {{"target", fit_json(est.fits.target, cohort)}, {"competing", fit_json(est.fits.competing, cohort)}};
  m["seeds"] = {{"bootstrap", a.seed}};
  if (bands) {
    m["bootstrap"] = {{"replicates", bands->requested}, {"level", a.level},     {"succeeded", bands->succeeded},
                      {"skipped", bands->skipped},      {"skipped_replicates", bands->skipped_replicates}};
  } else {
    m["bootstrap"] = {{"replicates", 0}, {"level", a.level}, {"succeeded", 0}, {"skipped", 0},
                      {"skipped_replicates", std::vector<int>{}}};
  }
  m["outputs"] = {{"components.csv", sha256_hex(components)}};
  write_file(dir / "manifest.json", finish_manifest(m));

  out << "decompose: " << cohort.size() << " subjects, " << cohort.intervals() << " intervals";
  if (bands) out << ", " << bands->succeeded << "/" << bands->requested << " bootstrap replicates";
  out << "\nwrote " << (dir / "components.csv").string() << " and " << (dir / "manifest.json").string() << "\n";
  return 0;
}

struct SimulateArgs {
  std::string config, preset, out_dir = ".";
  bool stratified = false;
  std::optional<long long> n;
  std::optional<std::uint64_t> seed;
  std::optional<double> censoring;
  unsigned threads = 0;
};

Manifest scenario_json(const ScenarioSpec& s) {
  Manifest strata = Manifest::array();
  for (const auto& st : s.strata) {
    strata.push_back({{"probability", st.probability},
                      {"target_treated", st.target_treated},
                      {"target_reference", st.target_reference},
                      {"competing_treated", st.competing_treated},
                      {"competing_reference", st.competing_reference}});
  }
  return {{"name", s.name},
          {"grid", s.grid},
          {"n", s.n},
          {"seed", s.seed},
          {"treatment_probability", s.treatment_probability},
          {"censoring_hazard", s.censoring_hazard},
          {"strata", strata}};
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  std::optional<RunConfig> cfg;
  ScenarioSpec spec;
  if (!a.preset.empty()) {
    spec = preset_scenario(a.preset, a.stratified);
  } else if (!a.config.empty()) {
    cfg = load_config(a.config);
    if (!cfg->scenario) throw ValidationError("config has no [scenario] section: " + a.config);
    spec = *cfg->scenario;
  } else {
    throw ValidationError("simulate needs --preset or --config");
  }
  if (a.n) {
    if (*a.n < 1) throw ValidationError("scenario sample size n must be at least 1");
    spec.n = static_cast<std::size_t>(*a.n);
  }
  if (a.seed) spec.seed = *a.seed;
  if (a.censoring) spec.censoring_hazard = *a.censoring;
  spec.validate();

  const Cohort cohort = simulate_cohort(spec);
  const DecompositionCurve truth = monte_carlo_truth(spec, a.threads);
  const DecompositionCurve closed = closed_form_truth(spec);

  std::ostringstream cohort_csv;
  write_csv(cohort, cohort_csv);
  const std::string truth_csv = wide_csv(truth);
  const std::string closed_csv = wide_csv(closed);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  write_file(dir / "cohort.csv", cohort_csv.str());
  write_file(dir / "truth.csv", truth_csv);
  write_file(dir / "closed_form.csv", closed_csv);

  Manifest m;
  m["tool"] = "fourway";
  m["version"] = kToolVersion;
  m["command"] = "simulate";
  if (cfg) {
    m["config"] = {{"path", a.config}, {"format", cfg->format}, {"sha256", sha256_hex(cfg->text)}, {"text", cfg->text}};
  } else {
    m["preset"] = {{"name", a.preset}, {"stratified", a.stratified}, {"version", std::string(kPresetVersion)}};
  }
  m["scenario"] = scenario_json(spec);
  m["seeds"] = {{"simulation", spec.seed}};
  m["outputs"] = {{"cohort.csv", sha256_hex(cohort_csv.str())},
                  {"truth.csv", sha256_hex(truth_csv)},
                  {"closed_form.csv", sha256_hex(closed_csv)}};
  write_file(dir / "manifest.json", finish_manifest(m));

  out << "simulate: " << spec.name << ", n=" << spec.n << ", seed=" << spec.seed << ", " << spec.intervals()
      << " intervals\nwrote cohort.csv, truth.csv, closed_form.csv and manifest.json to " << dir.string() << "\n";
  return 0;
}

int cmd_verify(int trials, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  if (trials < 1) throw ValidationError("--trials must be at least 1");
  const VerifyReport r = run_verify(trials, seed);
  auto verdict = [](bool ok) { return ok ? "pass" : "FAIL"; };
  auto row = [&](const char* name, double value, double tol) {
    out << std::left << std::setw(38) << name << std::setw(12) << std::setprecision(3) << std::scientific << value
        << "< " << std::setprecision(0) << tol << "  " << verdict(value < tol) << "\n";
  };
  out << r.enumeration_passed << "/" << r.enumeration_cases << " enumeration cases pass\n";
  out << r.trials << " random hazard tabulations (seed " << seed << ")\n";
  row("max |riskform - idform|", r.max_form_diff, VerifyReport::kIdentityTolerance);
  row("max |TE - sum of parts|", r.max_additivity, VerifyReport::kIdentityTolerance);
  row("max |closed-form NDE/NIE/TDE - sums|", r.max_combined_diff, VerifyReport::kIdentityTolerance);
  row("max |net risk sum - product form|", r.max_net_risk_diff, VerifyReport::kIdentityTolerance);
  row("max |RMST TE - sum of parts|", r.max_rmst_diff, VerifyReport::kRmstTolerance);
  out << std::defaultfloat;
  if (!r.ok()) {
    err << "verify failed; first offending input: " << r.first_failure << "\n";
    out << "verify: FAIL\n";
    return 1;
  }
  out << "verify: PASS\n";
  return 0;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[digest[i] >> 4];
    s += hex[digest[i] & 15];
  }
  return s;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Four-way decomposition of treatment effects with a competing event", "fourway"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  DecomposeArgs dec;
  auto* decompose = app.add_subcommand("decompose", "Estimate the decomposition from a cohort CSV");
  decompose->add_option("--input", dec.input, "Cohort CSV")->required();
  decompose->add_option("--config", dec.config, "Model configuration (TOML, or .json)")->required();
  decompose->add_option("--grid", dec.grid, "Time grid: t0,t1,...,tK or start:stop:step");
  decompose->add_option("--boot", dec.boot, "Bootstrap replicates (0 = point estimates only)");
  decompose->add_option("--seed", dec.seed, "Bootstrap seed");
  decompose->add_option("--level", dec.level, "Confidence level of the percentile bands");
  decompose->add_option("--ridge", dec.ridge, "Ridge penalty for both hazard models");
  decompose->add_option("--out-dir", dec.out_dir, "Output directory");
  decompose->add_option("--schema", dec.schema, "CSV schema override key=value (repeatable)");
  decompose->add_option("--threads", dec.threads, "Bootstrap threads (0 = all cores)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a cohort and its counterfactual truth");
  simulate->add_option("--config", sim.config, "Scenario configuration");
  simulate->add_option("--preset", sim.preset, "scenario1, scenario2 or scenario3");
  simulate->add_flag("--stratified", sim.stratified, "Preset with a binary stratum covariate");
  simulate->add_option("--n", sim.n, "Number of individuals");
  simulate->add_option("--seed", sim.seed, "Simulation seed");
  simulate->add_option("--censoring", sim.censoring, "Per-interval random censoring hazard");
  simulate->add_option("--out-dir", sim.out_dir, "Output directory");
  simulate->add_option("--threads", sim.threads, "Threads for the Monte Carlo truth (0 = all cores)");

  int trials = 1000;
  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "Run the built-in identity and enumeration checks");
  verify->add_option("--trials", trials, "Random hazard tabulations");
  verify->add_option("--seed", verify_seed, "Seed for the random tabulations");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*decompose) return cmd_decompose(dec, out, err);
    if (*simulate) return cmd_simulate(sim, out);
    return cmd_verify(trials, verify_seed, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const FitError& e) {
    err << "fit error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fourway
