#include "fourway/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fourway/decomp.hpp"
#include "fourway/rng.hpp"
#include "fourway/sim.hpp"

namespace fourway {

namespace {

std::string describe(const ControlledTimes& t, int k) {
  auto show = [](int v) { return v == kNever ? std::string("never") : std::to_string(v); };
  std::ostringstream os;
  os << "T_Y^a=" << show(t.target_treated) << " T_Y^a*=" << show(t.target_reference)
     << " T_D^a=" << show(t.competing_treated) << " T_D^a*=" << show(t.competing_reference) << " k=" << k;
  return os.str();
}

std::string describe(const std::vector<double>* h, int K, std::uint64_t seed, int trial) {
  std::ostringstream os;
  os.precision(17);
  os << "seed=" << seed << " trial=" << trial << " K=" << K;
  const char* names[] = {"lambda_Y(a)", "lambda_Y(a*)", "lambda_D(a)", "lambda_D(a*)"};
  for (int c = 0; c < 4; ++c) {
    os << ' ' << names[c] << "=[";
    for (std::size_t s = 0; s < h[c].size(); ++s) os << (s ? "," : "") << h[c][s];
    os << ']';
  }
  return os.str();
}

bool in_unit_set(int v) { return v == -1 || v == 0 || v == 1; }

}  // namespace

bool VerifyReport::identities_ok() const {
  return trials > 0 && max_form_diff < kIdentityTolerance && max_additivity < kIdentityTolerance &&
         max_combined_diff < kIdentityTolerance && max_net_risk_diff < kIdentityTolerance &&
         max_rmst_diff < kRmstTolerance;
}

void run_enumeration(VerifyReport& report) {
  const int values[] = {1, 2, 3, kNever};
  for (int ya : values) {
    for (int yr : values) {
      for (int da : values) {
        for (int dr : values) {
          const ControlledTimes t{ya, yr, da, dr};
          ++report.enumeration_cases;
          bool pass = true;
          for (int k = 1; k <= 3 && pass; ++k) {
            try {
              const IndividualEffects e = individual_decomposition(t, k);
              pass = in_unit_set(e.te) && in_unit_set(e.cde) && in_unit_set(e.int_ref) &&
                     in_unit_set(e.int_med) && in_unit_set(e.pie) &&
                     e.te == e.cde + e.int_ref + e.int_med + e.pie;
            } catch (const std::logic_error&) {
              pass = false;
            }
            if (!pass && report.first_failure.empty()) report.first_failure = "enumeration " + describe(t, k);
          }
          if (pass) ++report.enumeration_passed;
        }
      }
    }
  }
}

void run_identity_trials(VerifyReport& report, int trials, std::uint64_t seed) {
  for (int trial = 0; trial < trials; ++trial) {
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(trial));
    const int K = 1 + static_cast<int>(rng.uniform() * 8.0);
    std::vector<double> h[4];
    for (auto& v : h) {
      v.resize(static_cast<std::size_t>(K));
      for (double& x : v) x = 0.001 + 0.998 * rng.uniform();
    }
    std::vector<double> grid{0.0};
    for (int s = 0; s < K; ++s) grid.push_back(grid.back() + 0.1 + 5.0 * rng.uniform());

    const HazardCurves curves{h[0], h[1], h[2], h[3]};
    double form = 0.0, additivity = 0.0, combined = 0.0, net = 0.0, rmst = 0.0;
    const auto risk_curve = components_riskform_curve(curves);
    const auto id_curve = components_idform_curve(curves);
    for (int k = 1; k <= K; ++k) {
      const FourWay r = components_riskform(curves, k);
      const FourWay d = components_idform(curves, k);
      const FourWay& rc = risk_curve[static_cast<std::size_t>(k - 1)];
      const FourWay& dc = id_curve[static_cast<std::size_t>(k - 1)];
      for (const FourWay* x : {&d, &rc, &dc}) {
        form = std::max({form, std::abs(r.te - x->te), std::abs(r.cde - x->cde), std::abs(r.int_ref - x->int_ref),
                         std::abs(r.int_med - x->int_med), std::abs(r.pie - x->pie)});
      }
      additivity = std::max({additivity, std::abs(r.te - r.sum_of_parts()), std::abs(d.te - d.sum_of_parts())});
      const Combined closed = combined_closed_form(curves, k);
      const Combined sums = combos(d);
      combined = std::max({combined, std::abs(closed.nde - sums.nde), std::abs(closed.nie - sums.nie),
                           std::abs(closed.tde - sums.tde)});
      for (const auto& v : h) {
        double survival = 1.0;
        for (int s = 0; s < k; ++s) survival *= 1.0 - v[static_cast<std::size_t>(s)];
        try {
          net = std::max(net, std::abs(net_risk(v, k) - (1.0 - survival)));
        } catch (const std::logic_error&) {
          net = std::max(net, 1.0);
        }
      }
    }
    const DecompositionCurve c = make_curve(id_curve, grid);
    for (const EffectSet& e : c.rmst) {
      const auto at = [&](Component x) { return e[static_cast<std::size_t>(x)]; };
      rmst = std::max(rmst, std::abs(at(Component::TE) - (at(Component::CDE) + at(Component::INT_ref) +
                                                          at(Component::INT_med) + at(Component::PIE))));
    }

    const bool bad = !(form < VerifyReport::kIdentityTolerance) || !(additivity < VerifyReport::kIdentityTolerance) ||
                     !(combined < VerifyReport::kIdentityTolerance) || !(net < VerifyReport::kIdentityTolerance) ||
                     !(rmst < VerifyReport::kRmstTolerance);
    if (bad && report.first_failure.empty()) report.first_failure = "identity " + describe(h, K, seed, trial);
    report.max_form_diff = std::max(report.max_form_diff, form);
    report.max_additivity = std::max(report.max_additivity, additivity);
    report.max_combined_diff = std::max(report.max_combined_diff, combined);
    report.max_net_risk_diff = std::max(report.max_net_risk_diff, net);
    report.max_rmst_diff = std::max(report.max_rmst_diff, rmst);
    ++report.trials;
  }
}

VerifyReport run_verify(int trials, std::uint64_t seed) {
  VerifyReport report;
  run_enumeration(report);
  run_identity_trials(report, trials, seed);
  return report;
}

}  // namespace fourway
