#include "fourway/hazards.hpp"

#include <algorithm>

#include "fourway/error.hpp"

namespace fourway {

namespace {

std::string cause_label(Cause c) { return c == Cause::Target ? "target" : "competing"; }

HazardModel fit_one(const Cohort& cohort, const CauseModelSpec& spec, Cause cause,
                    const std::vector<double>& event_times) {
  HazardModel model;
  model.cause = cause;
  model.spec = spec;
  for (const auto& name : spec.covariates) model.covariate_index.push_back(cohort.covariate_index(name));

  const RiskSetTable table = expand_person_periods(cohort, cause);
  model.rows = table.rows.size();
  model.events = table.events();
  if (model.events == 0) {
    throw FitError(cause_label(cause) + " model: cannot fit hazard for cause with no events");
  }
  try {
    model.basis = SplineBasis(make_knots(event_times, spec.time_df));
  } catch (const ValidationError& e) {
    throw FitError(cause_label(cause) + " model: " + e.what());
  }

  DesignMatrix design;
  const std::size_t p = model.columns();
  design.values.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(p));
  design.labels = model.labels(cohort);
  std::vector<double> y(table.rows.size());
  std::vector<double> row(p);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    model.design_row(r.treatment, cohort.records[r.subject].covariates, r.time, row);
    for (std::size_t j = 0; j < p; ++j) {
      design.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
    y[i] = r.outcome;
  }
  try {
    model.fit = fit_logistic(design, y, spec.ridge);
  } catch (const FitError& e) {
    throw FitError(cause_label(cause) + " model: " + e.what());
  }
  return model;
}

}  // namespace

void ModelSpec::validate(const Cohort& cohort) const {
  for (const auto* spec : {&target, &competing}) {
    if (spec->time_df < 1) throw ValidationError("time_df must be at least 1");
    if (!(spec->ridge >= 0.0)) throw ValidationError("ridge must be nonnegative");
    for (const auto& name : spec->covariates) cohort.covariate_index(name);
  }
}

std::size_t HazardModel::columns() const {
  const std::size_t spline = basis.columns();
  return 2 + covariate_index.size() + spline + (spec.treatment_time_interaction ? spline : 0);
}

std::vector<std::string> HazardModel::labels(const Cohort& cohort) const {
  std::vector<std::string> out = {"(Intercept)", "treatment"};
  for (std::size_t idx : covariate_index) out.push_back(cohort.covariate_names[idx]);
  for (std::size_t j = 0; j < basis.columns(); ++j) out.push_back("time_ns" + std::to_string(j + 1));
  if (spec.treatment_time_interaction) {
    for (std::size_t j = 0; j < basis.columns(); ++j) {
      out.push_back("treatment:time_ns" + std::to_string(j + 1));
    }
  }
  return out;
}

void HazardModel::design_row(Arm arm, std::span<const double> covariates, double time,
                             std::span<double> out) const {
  const double trt = arm_value(arm);
  std::size_t j = 0;
  out[j++] = 1.0;
  out[j++] = trt;
  for (std::size_t idx : covariate_index) out[j++] = covariates[idx];
  const std::size_t spline = basis.columns();
  basis.row(time, out.subspan(j, spline));
  if (spec.treatment_time_interaction) {
    for (std::size_t q = 0; q < spline; ++q) out[j + spline + q] = trt * out[j + q];
  }
}

double HazardModel::hazard(Arm arm, std::span<const double> covariates, double time) const {
  std::vector<double> row(columns());
  design_row(arm, covariates, time, row);
  return predict_prob(fit, row);
}

CauseSpecificFits fit_cause_specific(const Cohort& cohort, const ModelSpec& spec) {
  cohort.validate();
  spec.validate(cohort);
  std::vector<double> event_times;
  for (const auto& r : cohort.records) {
    if (r.event != EventCode::Censored) event_times.push_back(cohort.grid[static_cast<std::size_t>(r.time_index)]);
  }
  CauseSpecificFits fits;
  fits.target = fit_one(cohort, spec.target, Cause::Target, event_times);
  fits.competing = fit_one(cohort, spec.competing, Cause::Competing, event_times);
  return fits;
}

HazardSurface::HazardSurface(std::size_t subjects, int intervals)
    : subjects_(subjects),
      intervals_(intervals),
      values_(subjects * 4 * static_cast<std::size_t>(intervals), 0.0) {}

HazardCurves HazardSurface::curves(std::size_t subject) const {
  return {curve(subject, Arm::Treated, Cause::Target), curve(subject, Arm::Reference, Cause::Target),
          curve(subject, Arm::Treated, Cause::Competing),
          curve(subject, Arm::Reference, Cause::Competing)};
}

HazardSurface hazard_surface(const CauseSpecificFits& fits, const Cohort& cohort) {
  const int K = cohort.intervals();
  HazardSurface surface(cohort.size(), K);
  for (const Cause cause : {Cause::Target, Cause::Competing}) {
    const HazardModel& model = fits.for_cause(cause);
    std::vector<double> row(model.columns());
    for (std::size_t i = 0; i < cohort.size(); ++i) {
      const auto& cov = cohort.records[i].covariates;
      for (const Arm arm : {Arm::Treated, Arm::Reference}) {
        for (int s = 1; s <= K; ++s) {
          model.design_row(arm, cov, cohort.grid[static_cast<std::size_t>(s)], row);
          surface.at(i, arm, cause, s) = predict_prob(model.fit, row);
        }
      }
    }
  }
  return surface;
}

}  // namespace fourway
