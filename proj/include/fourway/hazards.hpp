#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fourway/dataio.hpp"
#include "fourway/decomp.hpp"
#include "fourway/glm.hpp"
#include "fourway/splines.hpp"

namespace fourway {

// Specification of one cause-specific hazard regression.
struct CauseModelSpec {
  int time_df = 3;
  std::vector<std::string> covariates;
  bool treatment_time_interaction = false;
  double ridge = 0.0;
};

// Separate specifications for the target (Y) and competing (D) models.
struct ModelSpec {
  CauseModelSpec target;
  CauseModelSpec competing;

  static ModelSpec both(const CauseModelSpec& spec) { return {spec, spec}; }
  const CauseModelSpec& for_cause(Cause c) const { return c == Cause::Target ? target : competing; }

  // Throws ValidationError if time_df < 1, ridge < 0 or a covariate is
  // missing from the cohort.
  void validate(const Cohort& cohort) const;
};

// A fitted cause-specific discrete hazard model. Design columns are
// intercept, treatment, covariates, time spline and (optionally)
// treatment x time spline, with time entering through t_s.
struct HazardModel {
  Cause cause = Cause::Target;
  CauseModelSpec spec;
  SplineBasis basis;
  std::vector<std::size_t> covariate_index;  // into Cohort::covariate_names
  LogisticFit fit;
  std::size_t rows = 0;
  std::size_t events = 0;

  std::size_t columns() const;
  std::vector<std::string> labels(const Cohort& cohort) const;
  // `covariates` is the subject's full covariate vector.
  void design_row(Arm arm, std::span<const double> covariates, double time,
                  std::span<double> out) const;
  double hazard(Arm arm, std::span<const double> covariates, double time) const;
};

struct CauseSpecificFits {
  HazardModel target;
  HazardModel competing;

  const HazardModel& for_cause(Cause c) const { return c == Cause::Target ? target : competing; }
};

// Fits both hazard models on their person-period tables. Knots for each
// cause are placed on the pooled distinct event times (both causes).
// Throws FitError labelled with the cause.
CauseSpecificFits fit_cause_specific(const Cohort& cohort, const ModelSpec& spec);

// Counterfactual hazards for every subject, arm, cause and interval.
class HazardSurface {
 public:
  HazardSurface() = default;
  HazardSurface(std::size_t subjects, int intervals);

  std::size_t subjects() const { return subjects_; }
  int intervals() const { return intervals_; }

  double operator()(std::size_t subject, Arm arm, Cause cause, int s) const {
    return values_[offset(subject, arm, cause) + static_cast<std::size_t>(s - 1)];
  }
  double& at(std::size_t subject, Arm arm, Cause cause, int s) {
    return values_[offset(subject, arm, cause) + static_cast<std::size_t>(s - 1)];
  }
  std::span<const double> curve(std::size_t subject, Arm arm, Cause cause) const {
    return {values_.data() + offset(subject, arm, cause), static_cast<std::size_t>(intervals_)};
  }
  HazardCurves curves(std::size_t subject) const;
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t offset(std::size_t subject, Arm arm, Cause cause) const {
    const std::size_t block = (subject * 2 + static_cast<std::size_t>(arm_value(arm))) * 2 +
                              (cause == Cause::Target ? 0 : 1);
    return block * static_cast<std::size_t>(intervals_);
  }

  std::size_t subjects_ = 0;
  int intervals_ = 0;
  std::vector<double> values_;
};

// Evaluates both models for every subject under both treatment levels, with
// the subject's own covariates, at every interval of the cohort grid.
HazardSurface hazard_surface(const CauseSpecificFits& fits, const Cohort& cohort);

}  // namespace fourway
