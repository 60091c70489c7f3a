#include "fourway/sim.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "fourway/error.hpp"

namespace fourway {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

void check_hazards(const std::vector<double>& h, int K, const std::string& what) {
  if (static_cast<int>(h.size()) != K) {
    throw ValidationError(what + ": expected " + std::to_string(K) + " hazards, found " +
                          std::to_string(h.size()));
  }
  for (double v : h) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(what + ": hazard outside [0,1]");
  }
}

int draw_censoring(double hazard, int K, SplitMix64& rng) {
  const double u = rng.uniform();
  if (hazard <= 0.0) return kNever;
  double survival = 1.0;
  for (int s = 1; s <= K; ++s) {
    survival *= 1.0 - hazard;
    if (u < 1.0 - survival) return s;
  }
  return kNever;
}

std::size_t draw_stratum(const ScenarioSpec& spec, SplitMix64& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t w = 0; w + 1 < spec.strata.size(); ++w) {
    cumulative += spec.strata[w].probability;
    if (u < cumulative) return w;
  }
  return spec.strata.size() - 1;
}

// Per-individual draw order on substream(seed, i): stratum, T_Y^a, T_Y^{a*},
// T_D^a, T_D^{a*}, arm, censoring time.
struct Individual {
  std::size_t stratum = 0;
  ControlledTimes times;
  Arm arm = Arm::Reference;
  int censor_time = kNever;
};

Individual draw_individual(const ScenarioSpec& spec, std::size_t index, bool observed_part) {
  SplitMix64 rng = substream(spec.seed, index);
  Individual ind;
  ind.stratum = draw_stratum(spec, rng);
  ind.times = draw_controlled_times(spec.strata[ind.stratum], rng);
  if (observed_part) {
    ind.arm = rng.uniform() < spec.treatment_probability ? Arm::Treated : Arm::Reference;
    ind.censor_time = draw_censoring(spec.censoring_hazard, spec.intervals(), rng);
  }
  return ind;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (grid.size() < 2) throw ValidationError("scenario grid needs at least two points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ValidationError("scenario grid must be strictly increasing");
  }
  if (n < 1) throw ValidationError("scenario sample size n must be at least 1");
  if (strata.empty()) throw ValidationError("scenario needs at least one stratum");
  if (!(treatment_probability >= 0.0 && treatment_probability <= 1.0)) {
    throw ValidationError("treatment probability outside [0,1]");
  }
  if (!(censoring_hazard >= 0.0 && censoring_hazard < 1.0)) {
    throw ValidationError("censoring hazard outside [0,1)");
  }
  double total = 0.0;
  const int K = intervals();
  for (std::size_t w = 0; w < strata.size(); ++w) {
    const auto& s = strata[w];
    const std::string label = "stratum " + std::to_string(w);
    if (!(s.probability >= 0.0)) throw ValidationError(label + ": negative probability");
    total += s.probability;
    check_hazards(s.target_treated, K, label + " target_treated");
    check_hazards(s.target_reference, K, label + " target_reference");
    check_hazards(s.competing_treated, K, label + " competing_treated");
    check_hazards(s.competing_reference, K, label + " competing_reference");
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("stratum probabilities must sum to 1");
}

ScenarioSpec preset_scenario(std::string_view name, bool stratified) {
  double competing_treated = 0.0;
  if (name == "scenario1") {
    competing_treated = 0.05;
  } else if (name == "scenario2") {
    competing_treated = 0.30;
  } else if (name == "scenario3") {
    competing_treated = 0.15;
  } else {
    throw ValidationError("unknown scenario preset: " + std::string(name));
  }
  constexpr int K = 10;
  constexpr double target_reference = 0.30;
  constexpr double target_treated_start = 0.08;
  constexpr double target_treated_slope = 0.35;
  constexpr double competing_reference = 0.15;
  constexpr double target_stratum_shift = 0.5;
  constexpr double competing_stratum_shift = 0.4;

  ScenarioSpec spec;
  spec.name = std::string(name) + (stratified ? "-stratified" : "");
  for (int k = 0; k <= K; ++k) spec.grid.push_back(k);

  auto make_stratum = [&](double shift_y, double shift_d, double probability) {
    Stratum s;
    s.probability = probability;
    for (int k = 1; k <= K; ++k) {
      const double t = spec.grid[static_cast<std::size_t>(k)];
      s.target_reference.push_back(logistic(logit(target_reference) + shift_y));
      s.target_treated.push_back(
          logistic(logit(target_treated_start) + target_treated_slope * t + shift_y));
      s.competing_reference.push_back(logistic(logit(competing_reference) + shift_d));
      s.competing_treated.push_back(logistic(logit(competing_treated) + shift_d));
    }
    return s;
  };
  if (stratified) {
    spec.strata.push_back(make_stratum(0.0, 0.0, 0.5));
    spec.strata.push_back(make_stratum(target_stratum_shift, competing_stratum_shift, 0.5));
  } else {
    spec.strata.push_back(make_stratum(0.0, 0.0, 1.0));
  }
  return spec;
}

int draw_time(std::span<const double> hazards, SplitMix64& rng) {
  const double u = rng.uniform();
  double survival = 1.0;
  for (std::size_t s = 0; s < hazards.size(); ++s) {
    survival *= 1.0 - hazards[s];
    if (u < 1.0 - survival) return static_cast<int>(s) + 1;
  }
  return kNever;
}

ControlledTimes draw_controlled_times(const Stratum& stratum, SplitMix64& rng) {
  ControlledTimes t;
  t.target_treated = draw_time(stratum.target_treated, rng);
  t.target_reference = draw_time(stratum.target_reference, rng);
  t.competing_treated = draw_time(stratum.competing_treated, rng);
  t.competing_reference = draw_time(stratum.competing_reference, rng);
  return t;
}

JointOutcome joint_outcome(int target_time, int competing_time, int k) {
  if (competing_time <= target_time) return {0, competing_time <= k ? 1 : 0};
  return {target_time <= k ? 1 : 0, 0};
}

IndividualEffects individual_decomposition(const ControlledTimes& t, int k) {
  // Controlled target indicators Y^{a',0}.
  const int yc_a = t.target_treated <= k ? 1 : 0;
  const int yc_r = t.target_reference <= k ? 1 : 0;
  // Joint processes Z^{a',a''}.
  const JointOutcome z_aa = joint_outcome(t.target_treated, t.competing_treated, k);
  const JointOutcome z_ar = joint_outcome(t.target_treated, t.competing_reference, k);
  const JointOutcome z_ra = joint_outcome(t.target_reference, t.competing_treated, k);
  const JointOutcome z_rr = joint_outcome(t.target_reference, t.competing_reference, k);

  IndividualEffects contrast;
  contrast.te = z_aa.y - z_rr.y;
  contrast.cde = yc_a - yc_r;
  contrast.int_ref = (z_ar.y - z_rr.y) - (yc_a - yc_r);
  contrast.int_med = (z_aa.y - z_ra.y) - (z_ar.y - z_rr.y);
  contrast.pie = z_ra.y - z_rr.y;

  IndividualEffects product;
  product.te = yc_a * (1 - z_aa.d) - yc_r * (1 - z_rr.d);
  product.cde = yc_a - yc_r;
  product.int_ref = -(yc_a * z_ar.d - yc_r * z_rr.d);
  product.int_med = -(yc_a * z_aa.d - yc_r * z_ra.d) + (yc_a * z_ar.d - yc_r * z_rr.d);
  product.pie = -yc_r * (z_ra.d - z_rr.d);

  if (contrast.te != product.te || contrast.cde != product.cde ||
      contrast.int_ref != product.int_ref || contrast.int_med != product.int_med ||
      contrast.pie != product.pie) {
    throw std::logic_error("contrast and product forms of the individual decomposition disagree");
  }
  if (contrast.te != contrast.cde + contrast.int_ref + contrast.int_med + contrast.pie) {
    throw std::logic_error("individual components do not sum to the total effect");
  }
  return contrast;
}

SubjectRecord observe(const ControlledTimes& times, Arm arm, int censor_time, int intervals) {
  const int target = arm == Arm::Treated ? times.target_treated : times.target_reference;
  const int competing = arm == Arm::Treated ? times.competing_treated : times.competing_reference;
  SubjectRecord r;
  r.treatment = arm;
  const int event_time = std::min(target, competing);
  if (censor_time <= intervals && censor_time <= event_time) {
    r.event = EventCode::Censored;
    r.time_index = censor_time;
  } else if (event_time <= intervals) {
    r.event = competing <= target ? EventCode::Competing : EventCode::Target;
    r.time_index = event_time;
  } else {
    r.event = EventCode::Censored;
    r.time_index = intervals + 1;
  }
  return r;
}

DecompositionCurve monte_carlo_truth(const ScenarioSpec& spec, unsigned threads) {
  spec.validate();
  const int K = spec.intervals();
  const auto Kz = static_cast<std::size_t>(K);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, spec.n));

  using Counts = std::vector<std::array<long long, 5>>;
  std::vector<Counts> partial(threads, Counts(Kz, {0, 0, 0, 0, 0}));
  auto work = [&](unsigned worker) {
    const std::size_t begin = spec.n * worker / threads;
    const std::size_t end = spec.n * (worker + 1) / threads;
    Counts& counts = partial[worker];
    for (std::size_t i = begin; i < end; ++i) {
      const Individual ind = draw_individual(spec, i, false);
      for (int k = 1; k <= K; ++k) {
        const IndividualEffects e = individual_decomposition(ind.times, k);
        auto& c = counts[static_cast<std::size_t>(k - 1)];
        c[0] += e.te;
        c[1] += e.cde;
        c[2] += e.int_ref;
        c[3] += e.int_med;
        c[4] += e.pie;
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  const double n = static_cast<double>(spec.n);
  std::vector<FourWay> means(Kz);
  for (std::size_t k = 0; k < Kz; ++k) {
    std::array<long long, 5> total = {0, 0, 0, 0, 0};
    for (const auto& counts : partial) {
      for (std::size_t c = 0; c < 5; ++c) total[c] += counts[k][c];
    }
    means[k] = {total[0] / n, total[1] / n, total[2] / n, total[3] / n, total[4] / n};
  }
  return make_curve(means, spec.grid);
}

DecompositionCurve closed_form_truth(const ScenarioSpec& spec) {
  spec.validate();
  const auto Kz = static_cast<std::size_t>(spec.intervals());
  std::vector<std::array<CompensatedSum, 5>> sums(Kz);
  for (const auto& stratum : spec.strata) {
    const auto curve = components_idform_curve(stratum.curves());
    for (std::size_t k = 0; k < Kz; ++k) {
      sums[k][0].add(stratum.probability * curve[k].te);
      sums[k][1].add(stratum.probability * curve[k].cde);
      sums[k][2].add(stratum.probability * curve[k].int_ref);
      sums[k][3].add(stratum.probability * curve[k].int_med);
      sums[k][4].add(stratum.probability * curve[k].pie);
    }
  }
  std::vector<FourWay> mix(Kz);
  for (std::size_t k = 0; k < Kz; ++k) {
    mix[k] = {sums[k][0].value(), sums[k][1].value(), sums[k][2].value(), sums[k][3].value(),
              sums[k][4].value()};
  }
  return make_curve(mix, spec.grid);
}

Cohort simulate_cohort(const ScenarioSpec& spec) {
  spec.validate();
  const int K = spec.intervals();
  Cohort cohort;
  cohort.grid = spec.grid;
  cohort.grid.push_back(spec.grid.back() + (spec.grid.back() - spec.grid[spec.grid.size() - 2]));
  const bool stratified = spec.strata.size() > 1;
  if (stratified) cohort.covariate_names = {"stratum"};
  cohort.records.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const Individual ind = draw_individual(spec, i, true);
    SubjectRecord r = observe(ind.times, ind.arm, ind.censor_time, K);
    r.id = std::to_string(i + 1);
    if (stratified) r.covariates = {static_cast<double>(ind.stratum)};
    cohort.records.push_back(std::move(r));
  }
  return cohort;
}

}  // namespace fourway
