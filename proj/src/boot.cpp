#include "fourway/boot.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

#include "fourway/error.hpp"
#include "fourway/pipeline.hpp"
#include "fourway/rng.hpp"

namespace fourway {

void BootstrapPlan::validate() const {
  if (replicates < 1) throw ValidationError("bootstrap needs at least one replicate");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0,1)");
}

Cohort resample_subjects(const Cohort& cohort, std::uint64_t seed, int replicate) {
  if (cohort.records.empty()) throw ValidationError("empty cohort");
  SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(replicate));
  Cohort out;
  out.grid = cohort.grid;
  out.covariate_names = cohort.covariate_names;
  out.records.reserve(cohort.size());
  const auto n = static_cast<double>(cohort.size());
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    auto pick = static_cast<std::size_t>(rng.uniform() * n);
    pick = std::min(pick, cohort.size() - 1);
    out.records.push_back(cohort.records[pick]);
  }
  return out;
}

double percentile(std::vector<double> sample, double probability) {
  if (sample.empty()) throw ValidationError("percentile of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double h = (static_cast<double>(sample.size()) - 1.0) * probability;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  return sample[lo] + (h - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

BootstrapBands bootstrap_curves(const Cohort& cohort, const ModelSpec& spec, const BootstrapPlan& plan) {
  plan.validate();
  cohort.validate();
  spec.validate(cohort);

  const auto B = static_cast<std::size_t>(plan.replicates);
  std::vector<std::optional<DecompositionCurve>> results(B);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t r = next++; r < B; r = next++) {
      try {
        const Cohort sample = resample_subjects(cohort, plan.seed, static_cast<int>(r));
        results[r] = estimate_decomposition(sample, spec).curve;
      } catch (const FitError&) {
        results[r].reset();
      }
    }
  };
  unsigned threads = plan.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : plan.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, B));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  BootstrapBands bands;
  bands.requested = plan.replicates;
  std::vector<const DecompositionCurve*> ok;
  for (std::size_t r = 0; r < B; ++r) {
    if (results[r]) {
      ok.push_back(&*results[r]);
    } else {
      bands.skipped_replicates.push_back(static_cast<int>(r));
    }
  }
  bands.succeeded = static_cast<int>(ok.size());
  bands.skipped = static_cast<int>(bands.skipped_replicates.size());
  if (ok.empty() || bands.skipped * 5 > plan.replicates) {
    throw FitError("bootstrap too fragile: " + std::to_string(bands.skipped) + " of " +
                   std::to_string(plan.replicates) + " replicates failed to fit");
  }

  const double lo_p = (1.0 - plan.level) / 2.0;
  const double hi_p = (1.0 + plan.level) / 2.0;
  const std::size_t K = ok.front()->risk.size();
  bands.risk_lower.resize(K);
  bands.risk_upper.resize(K);
  bands.rmst_lower.resize(K);
  bands.rmst_upper.resize(K);
  std::vector<double> sample(ok.size());
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t c = 0; c < kComponentCount; ++c) {
      for (std::size_t r = 0; r < ok.size(); ++r) sample[r] = ok[r]->risk[k][c];
      bands.risk_lower[k][c] = percentile(sample, lo_p);
      bands.risk_upper[k][c] = percentile(sample, hi_p);
      for (std::size_t r = 0; r < ok.size(); ++r) sample[r] = ok[r]->rmst[k][c];
      bands.rmst_lower[k][c] = percentile(sample, lo_p);
      bands.rmst_upper[k][c] = percentile(sample, hi_p);
    }
  }
  return bands;
}

}  // namespace fourway
