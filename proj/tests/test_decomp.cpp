#include <cmath>

#include "fourway/decomp.hpp"
#include "fourway/error.hpp"
#include "support.hpp"

using namespace fourway;

namespace {

struct World {
  std::vector<double> ya, yr, da, dr;
  HazardCurves curves() const { return {ya, yr, da, dr}; }
  World swapped() const { return {yr, ya, dr, da}; }
};

World random_world(SplitMix64& rng, int K) {
  return {fw_test::random_hazards(rng, K), fw_test::random_hazards(rng, K), fw_test::random_hazards(rng, K),
          fw_test::random_hazards(rng, K)};
}

// P(T = s) for s = 1..K, with index K+1 holding "never".
std::vector<double> time_law(const std::vector<double>& h) {
  std::vector<double> p;
  double surv = 1.0;
  for (double l : h) {
    p.push_back(surv * l);
    surv *= 1 - l;
  }
  p.push_back(surv);
  return p;
}

// Population components by brute-force expectation over all (K+1)^4
// combinations of independent controlled times, using the counterfactual
// contrasts directly: Y^{a',a''}_k = 1{T_Y^{a'} <= k, T_Y^{a'} < T_D^{a''}}.
FourWay enumerate_population(const World& w, int k) {
  const int K = static_cast<int>(w.ya.size());
  const auto pya = time_law(w.ya), pyr = time_law(w.yr), pda = time_law(w.da), pdr = time_law(w.dr);
  FourWay out;
  for (int ya = 1; ya <= K + 1; ++ya)
    for (int yr = 1; yr <= K + 1; ++yr)
      for (int da = 1; da <= K + 1; ++da)
        for (int dr = 1; dr <= K + 1; ++dr) {
          const double p = pya[ya - 1] * pyr[yr - 1] * pda[da - 1] * pdr[dr - 1];
          auto y = [&](int ty, int td) { return (ty <= k && ty < td) ? 1.0 : 0.0; };
          const double y0a = ya <= k, y0r = yr <= k;
          out.te += p * (y(ya, da) - y(yr, dr));
          out.cde += p * (y0a - y0r);
          out.int_ref += p * ((y(ya, dr) - y(yr, dr)) - (y0a - y0r));
          out.int_med += p * ((y(ya, da) - y(yr, da)) - (y(ya, dr) - y(yr, dr)));
          out.pie += p * (y(yr, da) - y(yr, dr));
        }
  return out;
}

void check_close(const FourWay& a, const FourWay& b, double tol) {
  CHECK(std::abs(a.te - b.te) < tol);
  CHECK(std::abs(a.cde - b.cde) < tol);
  CHECK(std::abs(a.int_ref - b.int_ref) < tol);
  CHECK(std::abs(a.int_med - b.int_med) < tol);
  CHECK(std::abs(a.pie - b.pie) < tol);
}

}  // namespace

TEST_SUITE("decomp") {

TEST_CASE("net risk examples") {
  const std::vector<double> zero(4, 0.0);
  for (int k = 0; k <= 4; ++k) CHECK(net_risk(zero, k) == 0.0);
  CHECK(net_risk(std::vector<double>{0.5, 0.5}, 2) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(net_risk(std::vector<double>{0.1, 0.2, 0.3}, 3) == doctest::Approx(0.496).epsilon(1e-14));
  const auto curve = net_risk_curve(std::vector<double>{0.1, 0.2, 0.3});
  REQUIRE(curve.size() == 4);
  CHECK(curve[0] == 0.0);
  CHECK(curve[1] == doctest::Approx(0.1));
  CHECK(curve[2] == doctest::Approx(0.28));
}

TEST_CASE("net risks are in [0,1] and nondecreasing") {
  SplitMix64 rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const auto h = fw_test::random_hazards(rng, 8, 0.0, 1.0);
    const auto F = net_risk_curve(h);
    for (std::size_t k = 1; k < F.size(); ++k) {
      CHECK(F[k] >= F[k - 1]);
      CHECK(F[k] <= 1.0);
    }
  }
}

TEST_CASE("interception probability edge cases") {
  const auto fy = net_risk_curve(std::vector<double>{0.2, 0.3, 0.1});
  const auto fd_zero = net_risk_curve(std::vector<double>{0, 0, 0});
  const auto fd_one = net_risk_curve(std::vector<double>{1, 0.5, 0.2});
  for (int k = 1; k <= 3; ++k) {
    CHECK(interception_prob(fy, fd_zero, k) == 0.0);
    CHECK(interception_prob(fy, fd_one, k) == doctest::Approx(1.0).epsilon(1e-15));
  }
  const auto fd = net_risk_curve(std::vector<double>{0.37, 0.1, 0.1});
  const auto fy2 = net_risk_curve(std::vector<double>{0.9, 0.1, 0.1});
  CHECK(interception_prob(fy, fd, 1) == doctest::Approx(0.37).epsilon(1e-15));
  CHECK(interception_prob(fy2, fd, 1) == doctest::Approx(0.37).epsilon(1e-15));
  // No target risk by k: defined as 0.
  const auto fy_zero = net_risk_curve(std::vector<double>{0, 0, 0.5});
  CHECK(interception_prob(fy_zero, fd, 2) == 0.0);
}

TEST_CASE("hand-computed single-interval world") {
  // K = 1: TE = ya(1-da) - yr(1-dr), CDE = ya - yr, INT_ref = -(ya - yr) dr,
  // INT_med = -(ya - yr)(da - dr), PIE = -yr (da - dr).
  const double ya = 0.3, yr = 0.5, da = 0.2, dr = 0.4;
  const World w{{ya}, {yr}, {da}, {dr}};
  const FourWay r = components_riskform(w.curves(), 1);
  CHECK(r.te == doctest::Approx(ya * (1 - da) - yr * (1 - dr)));
  CHECK(r.cde == doctest::Approx(ya - yr));
  CHECK(r.int_ref == doctest::Approx(-(ya - yr) * dr));
  CHECK(r.int_med == doctest::Approx(-(ya - yr) * (da - dr)));
  CHECK(r.pie == doctest::Approx(-yr * (da - dr)));
}

TEST_CASE("both forms equal the brute-force counterfactual expectation") {
  SplitMix64 rng(23);
  for (int rep = 0; rep < 60; ++rep) {
    const int K = 1 + rep % 4;
    const World w = random_world(rng, K);
    for (int k = 1; k <= K; ++k) {
      const FourWay truth = enumerate_population(w, k);
      check_close(components_riskform(w.curves(), k), truth, 1e-12);
      check_close(components_idform(w.curves(), k), truth, 1e-12);
    }
  }
}

TEST_CASE("dual-form equivalence on random hazards") {
  SplitMix64 rng(29);
  for (int rep = 0; rep < 500; ++rep) {
    const int K = 1 + static_cast<int>(rng.uniform() * 6);
    const World w = random_world(rng, K);
    const auto rc = components_riskform_curve(w.curves());
    const auto ic = components_idform_curve(w.curves());
    for (int k = 1; k <= K; ++k) {
      const FourWay r = components_riskform(w.curves(), k);
      check_close(r, components_idform(w.curves(), k), 1e-12);
      check_close(r, rc[static_cast<std::size_t>(k - 1)], 1e-12);
      check_close(r, ic[static_cast<std::size_t>(k - 1)], 1e-12);
    }
  }
}

TEST_CASE("additivity, ranges and arm-swap antisymmetry") {
  SplitMix64 rng(31);
  for (int rep = 0; rep < 300; ++rep) {
    const int K = 1 + static_cast<int>(rng.uniform() * 8);
    const World w = random_world(rng, K);
    const auto a = components_idform_curve(w.curves());
    const auto b = components_idform_curve(w.swapped().curves());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(std::abs(a[k].te - a[k].sum_of_parts()) < 1e-12);
      for (double v : {a[k].te, a[k].cde, a[k].int_ref, a[k].int_med, a[k].pie}) CHECK(std::abs(v) <= 1.0);
      CHECK(b[k].te == doctest::Approx(-a[k].te).epsilon(1e-12));
      CHECK(b[k].cde == doctest::Approx(-a[k].cde).epsilon(1e-12));
      CHECK(std::abs(b[k].te - b[k].sum_of_parts()) < 1e-12);
    }
  }
}

TEST_CASE("no competing event: TE = CDE, other parts vanish") {
  SplitMix64 rng(37);
  for (int rep = 0; rep < 50; ++rep) {
    World w = random_world(rng, 6);
    std::fill(w.da.begin(), w.da.end(), 0.0);
    std::fill(w.dr.begin(), w.dr.end(), 0.0);
    for (int k = 1; k <= 6; ++k) {
      for (const FourWay& f : {components_riskform(w.curves(), k), components_idform(w.curves(), k)}) {
        CHECK(f.te == doctest::Approx(f.cde).epsilon(1e-14));
        CHECK(f.int_ref == 0.0);
        CHECK(f.int_med == 0.0);
        CHECK(f.pie == 0.0);
      }
      // With no competing event the id-form TE is the net-risk contrast.
      CHECK(components_idform(w.curves(), k).te ==
            doctest::Approx(net_risk(w.ya, k) - net_risk(w.yr, k)).epsilon(1e-14));
    }
  }
}

TEST_CASE("shared competing hazard: INT_med and PIE are exactly zero") {
  SplitMix64 rng(41);
  for (int rep = 0; rep < 50; ++rep) {
    World w = random_world(rng, 7);
    w.dr = w.da;
    for (int k = 1; k <= 7; ++k) {
      for (const FourWay& f : {components_riskform(w.curves(), k), components_idform(w.curves(), k)}) {
        CHECK(f.int_med == 0.0);
        CHECK(f.pie == 0.0);
      }
    }
  }
}

TEST_CASE("null treatment gives zero everywhere") {
  SplitMix64 rng(43);
  World w = random_world(rng, 5);
  w.yr = w.ya;
  w.dr = w.da;
  for (int k = 1; k <= 5; ++k) {
    for (const FourWay& f : {components_riskform(w.curves(), k), components_idform(w.curves(), k)}) {
      for (double v : {f.te, f.cde, f.int_ref, f.int_med, f.pie}) CHECK(v == 0.0);
    }
    const Combined c = combined_closed_form(w.curves(), k);
    CHECK(c.nde == 0.0);
    CHECK(c.nie == 0.0);
    CHECK(c.tde == 0.0);
  }
  const World zero{{0, 0}, {0, 0}, {0, 0}, {0, 0}};
  for (int k = 1; k <= 2; ++k) {
    const FourWay f = components_idform(zero.curves(), k);
    for (double v : {f.te, f.cde, f.int_ref, f.int_med, f.pie}) CHECK(v == 0.0);
  }
}

TEST_CASE("combinations of the parts") {
  const FourWay f{0.0, 0.1, -0.02, 0.01, -0.03};
  const Combined c = combos(f);
  CHECK(c.nde == doctest::Approx(0.08).epsilon(1e-15));
  CHECK(c.nie == doctest::Approx(-0.02).epsilon(1e-15));
  CHECK(c.tde == doctest::Approx(0.09).epsilon(1e-15));

  SplitMix64 rng(47);
  for (int rep = 0; rep < 300; ++rep) {
    const int K = 1 + static_cast<int>(rng.uniform() * 8);
    const World w = random_world(rng, K);
    for (int k = 1; k <= K; ++k) {
      const Combined closed = combined_closed_form(w.curves(), k);
      const Combined sums = combos(components_riskform(w.curves(), k));
      CHECK(std::abs(closed.nde - sums.nde) < 1e-12);
      CHECK(std::abs(closed.nie - sums.nie) < 1e-12);
      CHECK(std::abs(closed.tde - sums.tde) < 1e-12);
    }
  }
}

TEST_CASE("standardisation") {
  SplitMix64 rng(53);
  const World w = random_world(rng, 4);
  const std::vector<FourWay> one = components_idform_curve(w.curves());
  const std::vector<std::vector<FourWay>> single{one};
  const auto s1 = standardize(single);
  for (std::size_t k = 0; k < one.size(); ++k) CHECK(s1[k].te == one[k].te);

  std::vector<FourWay> neg = one;
  for (auto& f : neg) f = {-f.te, -f.cde, -f.int_ref, -f.int_med, -f.pie};
  const std::vector<std::vector<FourWay>> pair{one, neg};
  for (const auto& f : standardize(pair)) {
    for (double v : {f.te, f.cde, f.int_ref, f.int_med, f.pie}) CHECK(v == 0.0);
  }

  std::vector<std::vector<FourWay>> cohort;
  for (int i = 0; i < 7; ++i) cohort.push_back(components_idform_curve(random_world(rng, 4).curves()));
  std::vector<std::vector<FourWay>> doubled = cohort;
  doubled.insert(doubled.end(), cohort.begin(), cohort.end());
  const auto a = standardize(cohort), b = standardize(doubled);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(std::abs(a[k].te - b[k].te) < 1e-15);
    CHECK(std::abs(a[k].pie - b[k].pie) < 1e-15);
  }

  CHECK_THROWS_AS(standardize(std::vector<std::vector<FourWay>>{}), ValidationError);
  std::vector<std::vector<FourWay>> ragged{one, std::vector<FourWay>(2)};
  CHECK_THROWS_AS(standardize(ragged), ValidationError);
}

TEST_CASE("compensated mean does not depend on summation order") {
  std::vector<double> xs;
  SplitMix64 rng(59);
  for (int i = 0; i < 10000; ++i) xs.push_back((rng.uniform() - 0.5) * std::pow(10.0, -8 * rng.uniform()));
  CompensatedSum fwd, rev;
  for (double x : xs) fwd.add(x);
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) rev.add(*it);
  CHECK(std::abs(fwd.value() - rev.value()) < 1e-16);
}

TEST_CASE("RMST translation") {
  const std::vector<double> zero(3, 0.0);
  for (double v : rmst_scale(zero, std::vector<double>{0, 1, 2, 3})) CHECK(v == 0.0);
  const auto r = rmst_scale(std::vector<double>{0.1, 0.1}, std::vector<double>{0, 1, 2});
  CHECK(r[1] == doctest::Approx(-0.2).epsilon(1e-15));
  const auto uneven = rmst_scale(std::vector<double>{0.1, 0.3}, std::vector<double>{0, 2, 5});
  CHECK(uneven[0] == doctest::Approx(-0.2));
  CHECK(uneven[1] == doctest::Approx(-0.2 - 0.9));
  CHECK_THROWS_AS(rmst_scale(std::vector<double>{0.1, 0.3}, std::vector<double>{0, 2}), ValidationError);

  SplitMix64 rng(61);
  for (int rep = 0; rep < 200; ++rep) {
    const int K = 1 + static_cast<int>(rng.uniform() * 8);
    const World w = random_world(rng, K);
    std::vector<double> grid{rng.uniform()};
    for (int s = 0; s < K; ++s) grid.push_back(grid.back() + 0.01 + 20 * rng.uniform());
    const DecompositionCurve c = make_curve(components_idform_curve(w.curves()), grid);
    for (int k = 1; k <= K; ++k) {
      for (Scale sc : {Scale::Risk, Scale::Rmst}) {
        const double parts = c.value(sc, Component::CDE, k) + c.value(sc, Component::INT_ref, k) +
                             c.value(sc, Component::INT_med, k) + c.value(sc, Component::PIE, k);
        CHECK(std::abs(c.value(sc, Component::TE, k) - parts) < 1e-10);
        CHECK(std::abs(c.value(sc, Component::NDE, k) -
                       (c.value(sc, Component::CDE, k) + c.value(sc, Component::INT_ref, k))) < 1e-12);
        CHECK(std::abs(c.value(sc, Component::NIE, k) -
                       (c.value(sc, Component::INT_med, k) + c.value(sc, Component::PIE, k))) < 1e-12);
        CHECK(std::abs(c.value(sc, Component::TDE, k) -
                       (c.value(sc, Component::CDE, k) + c.value(sc, Component::INT_ref, k) +
                        c.value(sc, Component::INT_med, k))) < 1e-12);
      }
    }
  }
}

TEST_CASE("names") {
  CHECK(component_name(Component::INT_med) == "INT_med");
  CHECK(component_name(Component::TDE) == "TDE");
  CHECK(scale_name(Scale::Rmst) == "rmst");
}

}
