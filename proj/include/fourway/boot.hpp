#pragma once

#include <cstdint>
#include <vector>

#include "fourway/dataio.hpp"
#include "fourway/decomp.hpp"
#include "fourway/hazards.hpp"

namespace fourway {

struct BootstrapPlan {
  int replicates = 200;
  std::uint64_t seed = 1;
  double level = 0.95;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

// Percentile bands; entry k-1 belongs to t_k, indexed by component.
struct BootstrapBands {
  std::vector<EffectSet> risk_lower, risk_upper;
  std::vector<EffectSet> rmst_lower, rmst_upper;
  int requested = 0;
  int succeeded = 0;
  int skipped = 0;
  std::vector<int> skipped_replicates;

  double lower(Scale scale, Component c, int k) const {
    const auto& v = scale == Scale::Risk ? risk_lower : rmst_lower;
    return v[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(c)];
  }
  double upper(Scale scale, Component c, int k) const {
    const auto& v = scale == Scale::Risk ? risk_upper : rmst_upper;
    return v[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(c)];
  }
};

// Subjects drawn with replacement from substream(plan.seed, replicate).
Cohort resample_subjects(const Cohort& cohort, std::uint64_t seed, int replicate);

// Linear-interpolation (type 7) quantile of an unsorted sample.
double percentile(std::vector<double> sample, double probability);

// Nonparametric bootstrap: every replicate reruns the whole estimation
// pipeline (knots included) on resampled subjects. Replicates whose hazard
// fits fail are skipped and counted; more than 20% failures throws FitError.
// Results are merged by replicate index, so they do not depend on threads.
BootstrapBands bootstrap_curves(const Cohort& cohort, const ModelSpec& spec, const BootstrapPlan& plan);

}  // namespace fourway
