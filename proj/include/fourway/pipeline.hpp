#pragma once

#include "fourway/dataio.hpp"
#include "fourway/decomp.hpp"
#include "fourway/hazards.hpp"

namespace fourway {

struct Estimate {
  CauseSpecificFits fits;
  DecompositionCurve curve;
};

// Per-subject decomposition from a hazard surface, averaged over the cohort's
// empirical covariate distribution, with combined effects and RMST scale.
DecompositionCurve standardized_curve(const HazardSurface& surface, const std::vector<double>& grid);

// expand -> fit -> surface -> decompose -> standardize -> combine -> RMST.
Estimate estimate_decomposition(const Cohort& cohort, const ModelSpec& spec);

}  // namespace fourway
