// Acceptance gate: one PASS/FAIL line per criterion.
//
//   acceptance            all criteria
//   acceptance 3 5        selected criteria
//
// The prostate criteria read FOURWAY_PROSTATE_CSV, else data/prostate.csv in
// the source tree (see tools/prepare_prostate.py).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fourway/boot.hpp"
#include "fourway/config.hpp"
#include "fourway/pipeline.hpp"
#include "fourway/sim.hpp"
#include "fourway/verify.hpp"

using namespace fourway;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

std::string fix(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr Component kFive[] = {Component::TE, Component::CDE, Component::INT_ref, Component::INT_med, Component::PIE};

// Largest risk-scale gap over all components and k = 1..K.
double max_risk_gap(const DecompositionCurve& a, const DecompositionCurve& b, int K) {
  double worst = 0.0;
  for (int k = 1; k <= K; ++k)
    for (Component c : kAllComponents) worst = std::max(worst, std::abs(a.value(Scale::Risk, c, k) - b.value(Scale::Risk, c, k)));
  return worst;
}

double rmst_additivity(const DecompositionCurve& c) {
  double worst = 0.0;
  for (int k = 1; k <= c.intervals(); ++k) {
    double parts = 0.0;
    for (Component x : {Component::CDE, Component::INT_ref, Component::INT_med, Component::PIE}) parts += c.value(Scale::Rmst, x, k);
    worst = std::max(worst, std::abs(c.value(Scale::Rmst, Component::TE, k) - parts));
  }
  return worst;
}

std::string source_path(const std::string& rel) { return std::string(FOURWAY_SOURCE_DIR) + "/" + rel; }

std::string prostate_csv() {
  if (const char* env = std::getenv("FOURWAY_PROSTATE_CSV")) return env;
  return source_path("data/prostate.csv");
}

// The prostate estimate, shared by criteria 7 and 8; empty when the data are
// absent.
std::optional<Estimate> prostate_estimate(std::string& why) {
  const std::string path = prostate_csv();
  if (!std::filesystem::exists(path)) {
    why = "prostate data not found at " + path;
    return std::nullopt;
  }
  const RunConfig cfg = load_config(source_path("configs/prostate.toml"));
  CsvSchema schema = *cfg.schema;
  schema.covariates = cfg.model->target.covariates;
  return estimate_decomposition(load_csv(path, schema), *cfg.model);
}

Verdict c1() {
  const auto t0 = std::chrono::steady_clock::now();
  VerifyReport r;
  run_enumeration(r);
  const double secs = seconds_since(t0);
  return {r.enumeration_ok() && r.first_failure.empty() && secs < 1.0,
          std::to_string(r.enumeration_passed) + "/" + std::to_string(r.enumeration_cases) +
              " enumeration cases pass at k=1..3 in " + fix(secs, 3) + " s (limit 1 s)"};
}

Verdict c2() {
  VerifyReport r;
  run_identity_trials(r, 1000, 20240601);
  const bool ok = r.trials >= 1000 && r.max_form_diff < 1e-12 && r.max_combined_diff < 1e-12;
  return {ok, std::to_string(r.trials) + " tabulations; max |riskform-idform| " + sci(r.max_form_diff) +
                  ", max |closed-form NDE/NIE/TDE - sums| " + sci(r.max_combined_diff) + " (limit 1e-12)"};
}

struct PresetRun {
  DecompositionCurve mc, closed;
};
std::vector<PresetRun>& preset_runs() {
  static std::vector<PresetRun> runs;
  return runs;
}
double preset_seconds = 0.0;
constexpr std::size_t kOracleN = 1000000;

void ensure_preset_runs() {
  if (!preset_runs().empty()) return;
  const auto t0 = std::chrono::steady_clock::now();
  for (const char* name : {"scenario1", "scenario2", "scenario3"}) {
    ScenarioSpec s = preset_scenario(name);
    s.n = kOracleN;
    s.seed = 7;
    preset_runs().push_back({monte_carlo_truth(s), closed_form_truth(s)});
  }
  preset_seconds = seconds_since(t0);
}

Verdict c3() {
  ensure_preset_runs();
  std::string detail;
  bool ok = preset_seconds < 60.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double gap = max_risk_gap(preset_runs()[i].mc, preset_runs()[i].closed, 10);
    ok = ok && gap < 0.005;
    detail += "scenario" + std::to_string(i + 1) + " max gap " + fix(gap) + "; ";
  }
  return {ok, detail + "n=1e6 each, limit 0.005, " + fix(preset_seconds, 1) + " s (limit 60 s)"};
}

Verdict c4() {
  ensure_preset_runs();
  const PresetRun& r = preset_runs()[2];
  bool exact = true;
  double mc = 0.0;
  for (int k = 1; k <= 10; ++k) {
    for (Component c : {Component::INT_med, Component::PIE}) {
      exact = exact && r.closed.value(Scale::Risk, c, k) == 0.0;
      mc = std::max(mc, std::abs(r.mc.value(Scale::Risk, c, k)));
    }
  }
  const double bound = 3.0 / std::sqrt(double(kOracleN));
  return {exact && mc < bound, std::string("closed-form INT_med, PIE ") + (exact ? "exactly 0" : "NOT exactly 0") +
                                   "; Monte Carlo max |mean| " + fix(mc, 5) + " < 3/sqrt(n) = " + fix(bound, 5)};
}

struct Recovery {
  ScenarioSpec scenario;
  int censored = 0;
  DecompositionCurve curve;
};

Recovery run_recovery() {
  const RunConfig cfg = load_config(source_path("configs/scenario1_stratified.toml"));
  Recovery r;
  r.scenario = *cfg.scenario;
  const Cohort cohort = simulate_cohort(r.scenario);
  for (const auto& rec : cohort.records) r.censored += rec.event == EventCode::Censored && rec.time_index <= r.scenario.intervals();
  r.curve = estimate_decomposition(cohort, *cfg.model).curve;
  return r;
}

Verdict c5() {
  const auto t0 = std::chrono::steady_clock::now();
  const Recovery rec = run_recovery();
  const ScenarioSpec& s = rec.scenario;
  const int censored = rec.censored;
  const Estimate est{{}, rec.curve};
  const DecompositionCurve truth = closed_form_truth(s);
  const double gap = max_risk_gap(est.curve, truth, s.intervals());
  const double secs = seconds_since(t0);
  return {gap < 0.02 && secs < 120.0,
          "n=" + std::to_string(s.n) + ", " + fix(100.0 * censored / double(s.n), 1) +
              "% randomly censored; max |estimate - truth| " + fix(gap) + " (limit 0.02) in " + fix(secs, 2) +
              " s (limit 120 s)"};
}

Verdict c6() {
  const auto t0 = std::chrono::steady_clock::now();
  // Both arms follow the untreated hazards of the presets.
  ScenarioSpec null = preset_scenario("scenario1");
  null.name = "null";
  for (auto& st : null.strata) {
    st.target_treated = st.target_reference;
    st.competing_treated = st.competing_reference;
  }
  null.n = 2000;
  CauseModelSpec model;
  model.time_df = 3;
  const int reps = 50, mid_k = 5;
  int covered = 0, skipped = 0;
  for (int rep = 1; rep <= reps; ++rep) {
    null.seed = 1000 + static_cast<std::uint64_t>(rep);
    const Cohort cohort = simulate_cohort(null);
    BootstrapPlan plan;
    plan.replicates = 200;
    plan.seed = static_cast<std::uint64_t>(rep);
    const BootstrapBands b = bootstrap_curves(cohort, ModelSpec::both(model), plan);
    skipped += b.skipped;
    covered += b.lower(Scale::Risk, Component::TE, mid_k) <= 0.0 && 0.0 <= b.upper(Scale::Risk, Component::TE, mid_k);
  }
  return {covered >= 45, "TE 95% band covers 0 at k=" + std::to_string(mid_k) + " in " + std::to_string(covered) + "/" +
                             std::to_string(reps) + " repetitions (need >= 90%), n=2000, B=200, " +
                             std::to_string(skipped) + " skipped replicates, " + fix(seconds_since(t0), 1) + " s"};
}

Verdict c7() {
  VerifyReport r;
  run_identity_trials(r, 1000, 77);
  const double estimated = rmst_additivity(run_recovery().curve);
  std::string detail = "random inputs max " + sci(r.max_rmst_diff) + ", simulated-cohort estimate max " + sci(estimated);
  bool ok = r.max_rmst_diff < 1e-10 && estimated < 1e-10;
  std::string why;
  const auto prostate = prostate_estimate(why);
  if (prostate) {
    const double p = rmst_additivity(prostate->curve);
    detail += ", prostate run max " + sci(p);
    ok = ok && p < 1e-10;
  } else {
    detail += "; prostate run NOT evaluated: " + why;
    ok = false;
  }
  return {ok, detail + " (limit 1e-10)"};
}

Verdict c8() {
  std::string why;
  const auto est = prostate_estimate(why);
  if (!est) return {false, why + " (see tools/prepare_prostate.py)"};
  const DecompositionCurve& c = est->curve;
  bool cde_negative = true, pie_negative = true;
  double peak = 0.0, peak_t = 0.0;
  for (int k = 1; k <= c.intervals(); ++k) {
    const double t = c.grid[static_cast<std::size_t>(k)];
    if (t < 12.0 || t > 60.0) continue;
    const double cde = c.value(Scale::Risk, Component::CDE, k);
    cde_negative = cde_negative && cde < 0.0;
    pie_negative = pie_negative && c.value(Scale::Risk, Component::PIE, k) < 0.0;
    if (-cde > peak) {
      peak = -cde;
      peak_t = t;
    }
  }
  const bool near36 = peak_t >= 24.0 && peak_t <= 48.0;
  const bool ok = cde_negative && pie_negative && peak >= 0.04 && peak <= 0.12 && near36;
  return {ok, std::string("CDE ") + (cde_negative ? "negative" : "NOT negative") + " over 12-60 months; peak |CDE| " +
                  fix(peak) + " at " + fix(peak_t, 0) + " months (need [0.04, 0.12] within 24-48); PIE " +
                  (pie_negative ? "negative" : "NOT negative") + " over 12-60 months"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"exhaustive individual enumeration", c1},
      {"dual-form estimand identity", c2},
      {"oracle convergence", c3},
      {"scenario-3 collapse", c4},
      {"estimator recovery", c5},
      {"null coverage", c6},
      {"RMST identity", c7},
      {"prostate qualitative replication", c8},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);

  int failures = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    const auto& [title, run] = criteria[static_cast<std::size_t>(id - 1)];
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  C" << id << " " << title << ": " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
