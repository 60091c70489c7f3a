#include "fourway/decomp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fourway/error.hpp"

namespace fourway {

std::string_view component_name(Component c) {
  switch (c) {
    case Component::TE: return "TE";
    case Component::CDE: return "CDE";
    case Component::INT_ref: return "INT_ref";
    case Component::INT_med: return "INT_med";
    case Component::PIE: return "PIE";
    case Component::NDE: return "NDE";
    case Component::NIE: return "NIE";
    case Component::TDE: return "TDE";
  }
  return "?";
}

std::string_view scale_name(Scale s) { return s == Scale::Risk ? "risk" : "rmst"; }

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

namespace {

void check_k(int k, std::size_t K) {
  if (k < 0 || static_cast<std::size_t>(k) > K) {
    throw std::out_of_range("time index " + std::to_string(k) + " outside 0.." + std::to_string(K));
  }
}

void check_curves(const HazardCurves& h) {
  const auto K = h.target_treated.size();
  if (h.target_reference.size() != K || h.competing_treated.size() != K ||
      h.competing_reference.size() != K) {
    throw ValidationError("hazard curves must share one grid");
  }
}

double at(std::span<const double> hazards, int s) { return hazards[static_cast<std::size_t>(s - 1)]; }

// Target net point probability at s written as a hazard product:
// lambda_s * prod_{j=1}^{s} (1 - lambda_{j-1}) with lambda_0 = 0.
double target_point_prob(std::span<const double> target, int s) {
  double prod = 1.0;
  for (int j = 1; j <= s; ++j) prod *= 1.0 - (j == 1 ? 0.0 : at(target, j - 1));
  return at(target, s) * prod;
}

// prod_{j=1}^{s} (1 - lambda_j)
double survival_prod(std::span<const double> hazards, int s) {
  double prod = 1.0;
  for (int j = 1; j <= s; ++j) prod *= 1.0 - at(hazards, j);
  return prod;
}

FourWay riskform_from_net(std::span<const double> fy_a, std::span<const double> fy_r,
                          std::span<const double> fd_a, std::span<const double> fd_r, int k) {
  FourWay out;
  if (k == 0) return out;
  const double e_aa = interception_prob(fy_a, fd_a, k);
  const double e_ar = interception_prob(fy_a, fd_r, k);
  const double e_ra = interception_prob(fy_r, fd_a, k);
  const double e_rr = interception_prob(fy_r, fd_r, k);
  const double f_a = fy_a[static_cast<std::size_t>(k)];
  const double f_r = fy_r[static_cast<std::size_t>(k)];
  out.te = f_a * (1.0 - e_aa) - f_r * (1.0 - e_rr);
  out.cde = f_a - f_r;
  out.int_ref = -(f_a * e_ar - f_r * e_rr);
  out.int_med = -(f_a * (e_aa - e_ar) - f_r * (e_ra - e_rr));
  out.pie = -(f_r * (e_ra - e_rr));
  return out;
}

}  // namespace

double net_risk(std::span<const double> hazards, int k) {
  check_k(k, hazards.size());
  double sum_form = 0.0;
  double survival = 1.0;
  for (int s = 1; s <= k; ++s) {
    sum_form += at(hazards, s) * survival;
    survival *= 1.0 - at(hazards, s);
  }
  const double product_form = 1.0 - survival;
  if (std::abs(sum_form - product_form) > 1e-12) {
    throw std::logic_error("net risk forms disagree at k=" + std::to_string(k));
  }
  return sum_form;
}

std::vector<double> net_risk_curve(std::span<const double> hazards) {
  std::vector<double> out(hazards.size() + 1, 0.0);
  double survival = 1.0;
  for (std::size_t s = 1; s <= hazards.size(); ++s) {
    out[s] = out[s - 1] + hazards[s - 1] * survival;
    survival *= 1.0 - hazards[s - 1];
  }
  return out;
}

double interception_prob(std::span<const double> target_net, std::span<const double> competing_net,
                         int k) {
  if (k < 1) throw std::out_of_range("interception probability needs k >= 1");
  check_k(k, target_net.size() - 1);
  check_k(k, competing_net.size() - 1);
  const auto kk = static_cast<std::size_t>(k);
  const double total = target_net[kk];
  if (total == 0.0) return 0.0;
  double e = 0.0;
  for (std::size_t s = 1; s <= kk; ++s) {
    e += (target_net[s] - target_net[s - 1]) / total * competing_net[s];
  }
  return e;
}

FourWay components_riskform(const HazardCurves& h, int k) {
  check_curves(h);
  check_k(k, h.target_treated.size());
  const auto fy_a = net_risk_curve(h.target_treated);
  const auto fy_r = net_risk_curve(h.target_reference);
  const auto fd_a = net_risk_curve(h.competing_treated);
  const auto fd_r = net_risk_curve(h.competing_reference);
  return riskform_from_net(fy_a, fy_r, fd_a, fd_r, k);
}

std::vector<FourWay> components_riskform_curve(const HazardCurves& h) {
  check_curves(h);
  const auto fy_a = net_risk_curve(h.target_treated);
  const auto fy_r = net_risk_curve(h.target_reference);
  const auto fd_a = net_risk_curve(h.competing_treated);
  const auto fd_r = net_risk_curve(h.competing_reference);
  std::vector<FourWay> out;
  out.reserve(h.target_treated.size());
  for (int k = 1; k <= h.intervals(); ++k) out.push_back(riskform_from_net(fy_a, fy_r, fd_a, fd_r, k));
  return out;
}

FourWay components_idform(const HazardCurves& h, int k) {
  check_curves(h);
  check_k(k, h.target_treated.size());
  const auto& ya = h.target_treated;
  const auto& yr = h.target_reference;
  const auto& da = h.competing_treated;
  const auto& dr = h.competing_reference;
  FourWay out;
  for (int s = 1; s <= k; ++s) {
    const double py_a = target_point_prob(ya, s);
    const double py_r = target_point_prob(yr, s);
    const double sd_a = survival_prod(da, s);
    const double sd_r = survival_prod(dr, s);

    double cause_specific_a = at(ya, s);
    double cause_specific_r = at(yr, s);
    for (int j = 1; j <= s; ++j) {
      cause_specific_a *= (1.0 - at(da, j)) * (1.0 - (j == 1 ? 0.0 : at(ya, j - 1)));
      cause_specific_r *= (1.0 - at(dr, j)) * (1.0 - (j == 1 ? 0.0 : at(yr, j - 1)));
    }
    out.te += cause_specific_a - cause_specific_r;
    out.cde += py_a - py_r;
    out.int_ref -= py_a * (1.0 - sd_r) - py_r * (1.0 - sd_r);
    out.int_med += py_a * (sd_a - sd_r) - py_r * (sd_a - sd_r);
    out.pie += py_r * (sd_a - sd_r);
  }
  return out;
}

std::vector<FourWay> components_idform_curve(const HazardCurves& h) {
  check_curves(h);
  const int K = h.intervals();
  std::vector<FourWay> out(static_cast<std::size_t>(K));
  FourWay acc;
  double surv_ya = 1.0, surv_yr = 1.0;  // prod_{j<s} (1 - lambda_Y;j)
  double sd_a = 1.0, sd_r = 1.0;        // prod_{j<=s} (1 - lambda_D;j)
  for (int s = 1; s <= K; ++s) {
    sd_a *= 1.0 - at(h.competing_treated, s);
    sd_r *= 1.0 - at(h.competing_reference, s);
    const double py_a = at(h.target_treated, s) * surv_ya;
    const double py_r = at(h.target_reference, s) * surv_yr;
    acc.te += py_a * sd_a - py_r * sd_r;
    acc.cde += py_a - py_r;
    acc.int_ref -= py_a * (1.0 - sd_r) - py_r * (1.0 - sd_r);
    acc.int_med += py_a * (sd_a - sd_r) - py_r * (sd_a - sd_r);
    acc.pie += py_r * (sd_a - sd_r);
    out[static_cast<std::size_t>(s - 1)] = acc;
    surv_ya *= 1.0 - at(h.target_treated, s);
    surv_yr *= 1.0 - at(h.target_reference, s);
  }
  return out;
}

Combined combined_closed_form(const HazardCurves& h, int k) {
  check_curves(h);
  check_k(k, h.target_treated.size());
  Combined out;
  for (int s = 1; s <= k; ++s) {
    const double py_a = target_point_prob(h.target_treated, s);
    const double py_r = target_point_prob(h.target_reference, s);
    const double sd_a = survival_prod(h.competing_treated, s);
    const double sd_r = survival_prod(h.competing_reference, s);
    out.nde += py_a * sd_r - py_r * sd_r;
    out.nie += py_a * sd_a - py_a * sd_r;
    out.tde += py_a * sd_a - py_r * sd_a;
  }
  return out;
}

Combined combos(const FourWay& f) {
  return {f.cde + f.int_ref, f.int_med + f.pie, f.cde + f.int_ref + f.int_med};
}

std::vector<FourWay> standardize(std::span<const std::vector<FourWay>> per_subject) {
  if (per_subject.empty()) throw ValidationError("cannot standardize over zero subjects");
  const std::size_t K = per_subject.front().size();
  std::vector<std::array<CompensatedSum, 5>> sums(K);
  for (const auto& curve : per_subject) {
    if (curve.size() != K) throw ValidationError("subject curves differ in length");
    for (std::size_t k = 0; k < K; ++k) {
      sums[k][0].add(curve[k].te);
      sums[k][1].add(curve[k].cde);
      sums[k][2].add(curve[k].int_ref);
      sums[k][3].add(curve[k].int_med);
      sums[k][4].add(curve[k].pie);
    }
  }
  const double n = static_cast<double>(per_subject.size());
  std::vector<FourWay> out(K);
  for (std::size_t k = 0; k < K; ++k) {
    out[k] = {sums[k][0].value() / n, sums[k][1].value() / n, sums[k][2].value() / n,
              sums[k][3].value() / n, sums[k][4].value() / n};
  }
  return out;
}

std::vector<double> rmst_scale(std::span<const double> risk, std::span<const double> grid) {
  if (grid.size() != risk.size() + 1) {
    throw ValidationError("RMST translation needs a grid with one more point than the curve");
  }
  std::vector<double> out(risk.size());
  double acc = 0.0;
  for (std::size_t s = 1; s <= risk.size(); ++s) {
    acc -= (grid[s] - grid[s - 1]) * risk[s - 1];
    out[s - 1] = acc;
  }
  return out;
}

DecompositionCurve make_curve(std::span<const FourWay> risk, std::span<const double> grid) {
  DecompositionCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.risk.resize(risk.size());
  for (std::size_t k = 0; k < risk.size(); ++k) {
    const auto& f = risk[k];
    const Combined c = combos(f);
    curve.risk[k] = {f.te, f.cde, f.int_ref, f.int_med, f.pie, c.nde, c.nie, c.tde};
  }
  curve.rmst.resize(risk.size());
  std::vector<double> series(risk.size());
  for (std::size_t c = 0; c < kComponentCount; ++c) {
    for (std::size_t k = 0; k < risk.size(); ++k) series[k] = curve.risk[k][c];
    const auto r = rmst_scale(series, grid);
    for (std::size_t k = 0; k < risk.size(); ++k) curve.rmst[k][c] = r[k];
  }
  return curve;
}

}  // namespace fourway
