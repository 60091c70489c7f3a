#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace fourway {

// Effect components reported for every time index. The first five form the
// four-way decomposition (TE and its four parts); the last three are partial
// sums of those parts.
enum class Component { TE, CDE, INT_ref, INT_med, PIE, NDE, NIE, TDE };
inline constexpr std::size_t kComponentCount = 8;
inline constexpr std::array<Component, kComponentCount> kAllComponents = {
    Component::TE,  Component::CDE, Component::INT_ref, Component::INT_med,
    Component::PIE, Component::NDE, Component::NIE,     Component::TDE};

enum class Scale { Risk, Rmst };

std::string_view component_name(Component c);
std::string_view scale_name(Scale s);

// Total effect and its four parts at one time index.
struct FourWay {
  double te = 0.0;
  double cde = 0.0;
  double int_ref = 0.0;
  double int_med = 0.0;
  double pie = 0.0;

  double sum_of_parts() const { return cde + int_ref + int_med + pie; }
};

struct Combined {
  double nde = 0.0;
  double nie = 0.0;
  double tde = 0.0;
};

using EffectSet = std::array<double, kComponentCount>;

// Population effect curves on the risk and RMST scales. Entry k-1 of `risk`
// and `rmst` belongs to time t_k, k = 1..K.
struct DecompositionCurve {
  std::vector<double> grid;  // t_0..t_K
  std::vector<EffectSet> risk;
  std::vector<EffectSet> rmst;

  int intervals() const { return static_cast<int>(risk.size()); }
  double value(Scale scale, Component c, int k) const {
    const auto& v = scale == Scale::Risk ? risk : rmst;
    return v[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(c)];
  }
};

// Cause-specific hazard curves of one covariate pattern under both arms.
// Each span holds lambda_1..lambda_K (element s-1 is interval s).
struct HazardCurves {
  std::span<const double> target_treated;
  std::span<const double> target_reference;
  std::span<const double> competing_treated;
  std::span<const double> competing_reference;

  int intervals() const { return static_cast<int>(target_treated.size()); }
};

// Net risk F_k = sum_{s<=k} lambda_s prod_{j<s}(1 - lambda_j). The product
// form 1 - prod_{s<=k}(1 - lambda_s) is evaluated too and must agree.
double net_risk(std::span<const double> hazards, int k);

// F_0..F_K (F_0 = 0).
std::vector<double> net_risk_curve(std::span<const double> hazards);

// E_k(a', a''): probability that the target event, distributed by its
// conditional net law under a' given occurrence by t_k, is preceded by the
// competing event under a''. Arguments are net-risk curves F_0..F_K.
// Returns 0 when the target net risk by t_k is 0.
double interception_prob(std::span<const double> target_net, std::span<const double> competing_net,
                         int k);

// Decomposition from net risks and interception probabilities.
FourWay components_riskform(const HazardCurves& h, int k);

// Decomposition from products of hazards, with TE from the cause-specific
// cumulative-risk contrast. Independent of components_riskform.
FourWay components_idform(const HazardCurves& h, int k);

// All k = 1..K at once, O(K).
std::vector<FourWay> components_idform_curve(const HazardCurves& h);
std::vector<FourWay> components_riskform_curve(const HazardCurves& h);

// Direct hazard-product expressions for NDE, NIE and TDE.
Combined combined_closed_form(const HazardCurves& h, int k);

// Combinations of the four parts.
Combined combos(const FourWay& f);

// Unweighted mean over subjects at every k, using compensated summation.
// Throws ValidationError when empty or when curve lengths differ.
std::vector<FourWay> standardize(std::span<const std::vector<FourWay>> per_subject);

// R_k = -sum_{s<=k} (t_s - t_{s-1}) * risk_s. `risk` holds k = 1..K.
std::vector<double> rmst_scale(std::span<const double> risk, std::span<const double> grid);

// Assembles a curve: fills NDE/NIE/TDE from the parts and translates every
// component onto the RMST scale.
DecompositionCurve make_curve(std::span<const FourWay> risk, std::span<const double> grid);

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace fourway
