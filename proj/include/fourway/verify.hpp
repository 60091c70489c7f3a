#pragma once

#include <cstdint>
#include <string>

namespace fourway {

// Built-in identity suite run by `fourway verify`.
struct VerifyReport {
  int enumeration_cases = 0;   // controlled-time combinations on a 3-interval grid
  int enumeration_passed = 0;  // combinations passing at every k
  int trials = 0;
  double max_form_diff = 0.0;      // |riskform - idform|, any component
  double max_additivity = 0.0;     // |TE - sum of parts|, both forms
  double max_combined_diff = 0.0;  // closed-form NDE/NIE/TDE vs sums of parts
  double max_net_risk_diff = 0.0;  // sum form vs product form
  double max_rmst_diff = 0.0;      // RMST-scale additivity
  std::string first_failure;       // offending input, empty when everything passes

  static constexpr double kIdentityTolerance = 1e-12;
  static constexpr double kRmstTolerance = 1e-10;

  bool enumeration_ok() const { return enumeration_cases == 256 && enumeration_passed == enumeration_cases; }
  bool identities_ok() const;
  bool ok() const { return enumeration_ok() && identities_ok() && first_failure.empty(); }
};

// All 4^4 combinations of (T_Y^a, T_Y^{a*}, T_D^a, T_D^{a*}) in {1,2,3,never}
// at k = 1..3.
void run_enumeration(VerifyReport& report);

// `trials` random hazard tabulations with K in 1..8 and hazards in
// (0.001, 0.999), plus random grids for the RMST identity.
void run_identity_trials(VerifyReport& report, int trials, std::uint64_t seed);

VerifyReport run_verify(int trials, std::uint64_t seed);

}  // namespace fourway
