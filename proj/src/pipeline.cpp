#include "fourway/pipeline.hpp"

#include <cmath>
#include <stdexcept>

namespace fourway {

DecompositionCurve standardized_curve(const HazardSurface& surface, const std::vector<double>& grid) {
  std::vector<std::vector<FourWay>> per_subject;
  per_subject.reserve(surface.subjects());
  for (std::size_t i = 0; i < surface.subjects(); ++i) {
    per_subject.push_back(components_idform_curve(surface.curves(i)));
#ifndef NDEBUG
    const auto check = components_riskform_curve(surface.curves(i));
    for (std::size_t k = 0; k < check.size(); ++k) {
      const auto& a = per_subject.back()[k];
      const auto& b = check[k];
      const double diff = std::max({std::abs(a.te - b.te), std::abs(a.cde - b.cde),
                                    std::abs(a.int_ref - b.int_ref), std::abs(a.int_med - b.int_med),
                                    std::abs(a.pie - b.pie)});
      if (diff > 1e-10) throw std::logic_error("risk-form and hazard-form decompositions disagree");
    }
#endif
  }
  const auto mean = standardize(per_subject);
  return make_curve(mean, grid);
}

Estimate estimate_decomposition(const Cohort& cohort, const ModelSpec& spec) {
  Estimate est;
  est.fits = fit_cause_specific(cohort, spec);
  const HazardSurface surface = hazard_surface(est.fits, cohort);
  est.curve = standardized_curve(surface, cohort.grid);
  return est;
}

}  // namespace fourway
