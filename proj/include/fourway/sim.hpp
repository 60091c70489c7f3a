#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "fourway/dataio.hpp"
#include "fourway/decomp.hpp"
#include "fourway/rng.hpp"

namespace fourway {

// Interval index of an event that never happens on the grid.
inline constexpr int kNever = std::numeric_limits<int>::max();

// Tabulated hazards of one covariate stratum; element s-1 is interval s.
struct Stratum {
  double probability = 1.0;
  std::vector<double> target_treated;
  std::vector<double> target_reference;
  std::vector<double> competing_treated;
  std::vector<double> competing_reference;

  HazardCurves curves() const {
    return {target_treated, target_reference, competing_treated, competing_reference};
  }
};

// A potential-outcomes world. With more than one stratum the stratum index is
// a baseline covariate named "stratum".
struct ScenarioSpec {
  std::string name;
  std::vector<double> grid;  // t_0..t_K
  std::vector<Stratum> strata;
  std::size_t n = 10000;
  std::uint64_t seed = 1;
  double treatment_probability = 0.5;
  double censoring_hazard = 0.0;  // per-interval, independent of everything

  int intervals() const { return static_cast<int>(grid.size()) - 1; }
  // Throws ValidationError.
  void validate() const;
};

// Qualitative replicas of the three illustration worlds:
//   scenario1  treatment delays the competing event
//   scenario2  treatment accelerates the competing event
//   scenario3  treatment leaves the competing event unchanged
// Ten unit intervals. The target hazards are shared by all three: 0.30 per
// interval untreated; treated logit(0.08) + 0.35 t. The competing hazard is
// 0.15 untreated and 0.05 / 0.30 / 0.15 treated. With `stratified`, a second
// stratum (probability 0.5) adds 0.5 (target) and 0.4 (competing) on the
// logit scale. These values are fixed; changing them changes the presets'
// version.
ScenarioSpec preset_scenario(std::string_view name, bool stratified = false);
inline constexpr std::string_view kPresetVersion = "presets-v1";

struct ControlledTimes {
  int target_treated = kNever;       // T_Y^a
  int target_reference = kNever;     // T_Y^{a*}
  int competing_treated = kNever;    // T_D^a
  int competing_reference = kNever;  // T_D^{a*}
};

// Draws a time from the discrete law with hazards lambda_1..lambda_K by
// inversion of one uniform; kNever with the residual mass.
int draw_time(std::span<const double> hazards, SplitMix64& rng);

// The four controlled times, drawn independently given the stratum hazards.
ControlledTimes draw_controlled_times(const Stratum& stratum, SplitMix64& rng);

struct JointOutcome {
  int y = 0;
  int d = 0;
};

// Joint process of Y under a' (time target_time) and D under a'' (time
// competing_time) at k. D prevails on ties.
JointOutcome joint_outcome(int target_time, int competing_time, int k);

struct IndividualEffects {
  int te = 0;
  int cde = 0;
  int int_ref = 0;
  int int_med = 0;
  int pie = 0;
};

// Individual four-way decomposition at k. Both the contrast form and the
// product form are evaluated; disagreement throws std::logic_error.
IndividualEffects individual_decomposition(const ControlledTimes& times, int k);

// Observed record under consistency: first of the arm's own controlled times
// (competing on ties), unless censoring occurs at or before it. Subjects with
// neither event nor censoring by interval K are recorded as censored at K+1,
// i.e. under follow-up through t_K.
SubjectRecord observe(const ControlledTimes& times, Arm arm, int censor_time, int intervals);

// Means of the individual decomposition over spec.n draws at every k = 1..K,
// with combined effects and the RMST scale. Multithreaded; exact integer
// accumulation makes the result independent of the thread count.
DecompositionCurve monte_carlo_truth(const ScenarioSpec& spec, unsigned threads = 0);

// Closed-form population decomposition on the true hazards (stratum mixture).
DecompositionCurve closed_form_truth(const ScenarioSpec& spec);

// Observed cohort of spec.n individuals drawn from the same substreams as
// monte_carlo_truth. The grid is the scenario grid plus one extra point for
// end-of-follow-up censoring.
Cohort simulate_cohort(const ScenarioSpec& spec);

}  // namespace fourway
