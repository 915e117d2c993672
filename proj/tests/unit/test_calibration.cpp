#include <array>
#include <limits>

#include "doctest.h"
#include "support.hpp"

#include "sgem/calibration.hpp"
#include "sgem/dynamics.hpp"

using namespace sgem;
using test::rel;

TEST_CASE("LES calibration without subsistence gives budget shares") {
  const std::array<double, 3> q{30.0, 50.0, 20.0};
  const std::array<double, 3> p{1.0, 1.0, 1.0};
  const std::array<double, 3> eta{1.0, 1.0, 1.0};
  const auto c = calibrate_les(q, p, -std::numeric_limits<double>::infinity(), eta, 0.9);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(c.params.mu[j] == 0.0);
    CHECK(c.params.gamma[j] == doctest::Approx(q[j] / 100.0).epsilon(1e-15));
  }
  CHECK(c.clamped.empty());
}

TEST_CASE("LES calibration with a Frisch parameter") {
  // Frisch calibration: gamma_j = eta_j w_j, mu_j = C_j + gamma_j I / (P_j frisch).
  // With eta = 1, frisch = -2 and I = 100: mu = C - 50 w = (30, 20).
  const std::array<double, 2> q{60.0, 40.0};
  const std::array<double, 2> p{1.0, 1.0};
  const std::array<double, 2> eta{1.0, 1.0};
  const auto c = calibrate_les(q, p, -2.0, eta, 0.9);
  CHECK(c.params.mu[0] == doctest::Approx(30.0).epsilon(1e-14));
  CHECK(c.params.mu[1] == doctest::Approx(20.0).epsilon(1e-14));
  CHECK(c.params.gamma[0] == doctest::Approx(0.6).epsilon(1e-14));
  const auto back = les_demand(c.params, p, 100.0);
  CHECK(rel(back[0], 60.0) < 1e-14);
  CHECK(rel(back[1], 40.0) < 1e-14);

  // Non-unit prices: the benchmark is still reproduced.
  const std::array<double, 2> p2{1.5, 0.8};
  const std::array<double, 2> eta2{1.3, 0.55};
  const auto c2 = calibrate_les(q, p2, -2.5, eta2, 0.9);
  const auto back2 = les_demand(c2.params, p2, 60.0 * 1.5 + 40.0 * 0.8);
  CHECK(rel(back2[0], 60.0) < 1e-13);
  CHECK(rel(back2[1], 40.0) < 1e-13);
}

TEST_CASE("LES calibration edge cases") {
  const std::array<double, 3> q{60.0, 0.0, 40.0};
  const std::array<double, 3> p{1.0, 1.0, 1.0};
  const std::array<double, 3> eta{1.0, 1.0, 1.0};
  const auto c = calibrate_les(q, p, -2.0, eta, 0.9);
  CHECK(c.params.mu[1] == 0.0);
  CHECK(c.params.gamma[1] == 0.0);

  // A very income-elastic good would need a negative minimum: clamped to zero,
  // reported, and the benchmark still reproduced.
  const std::array<double, 2> q2{50.0, 50.0};
  const std::array<double, 2> p2{1.0, 1.0};
  const std::array<double, 2> eta2{3.0, 0.2};
  const auto k = calibrate_les(q2, p2, -1.2, eta2, 0.5);
  REQUIRE_FALSE(k.clamped.empty());
  double gsum = 0.0;
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(k.params.mu[j] >= 0.0);
    CHECK(k.params.mu[j] <= 0.5 * q2[j] + 1e-12);
    CHECK(k.params.gamma[j] >= 0.0);
    gsum += k.params.gamma[j];
  }
  CHECK(gsum == doctest::Approx(1.0).epsilon(1e-15));
  const auto back = les_demand(k.params, p2, 100.0);
  CHECK(rel(back[0], 50.0) < 1e-13);
  CHECK(rel(back[1], 50.0) < 1e-13);
}

TEST_CASE("bundled toys calibrate exactly and without clamping") {
  for (const char* name : {"toy_2x2", "toy_3x4", "toy_10x6"}) {
    CAPTURE(name);
    const auto& b = test::bundle(name);
    CHECK(b.cal.max_residual() < 1e-12);
    CHECK(b.cal.warnings.empty());
    CHECK_NOTHROW(b.cal.params.check_invariants());
    for (const auto& reg : b.cal.params.regions) {
      for (const auto* les : {&reg.household, &reg.government}) {
        double s = 0.0;
        for (double g : les->gamma) s += g;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("investment attractors") {
  Array2 cap(1, 2, 50.0), wkr(1, 2, 0.01), inv(1, 2);
  inv(0, 0) = 5.0;
  inv(0, 1) = 5.0;
  auto b = invert_investment_allocation(inv, cap, wkr, 3.0);
  CHECK(b(0, 0) == doctest::Approx(b(0, 1)).epsilon(1e-15));

  inv(0, 0) = 7.0;
  inv(0, 1) = 3.0;
  b = invert_investment_allocation(inv, cap, wkr, 3.0);
  CHECK(b(0, 0) / b(0, 1) == doctest::Approx(7.0 / 3.0).epsilon(1e-14));

  // theta = 0: B proportional to I / K whatever the remuneration rates.
  Array2 cap2(1, 3), wkr2(1, 3), inv2(1, 3);
  const double k[3] = {10.0, 40.0, 25.0}, i[3] = {2.0, 3.0, 5.0}, w[3] = {0.5, 0.01, 0.2};
  for (int j = 0; j < 3; ++j) {
    cap2(0, j) = k[j];
    wkr2(0, j) = w[j];
    inv2(0, j) = i[j];
  }
  b = invert_investment_allocation(inv2, cap2, wkr2, 0.0);
  CHECK(b(0, 0) / b(0, 1) == doctest::Approx((2.0 / 10.0) / (3.0 / 40.0)).epsilon(1e-14));
  CHECK(b(0, 2) / b(0, 1) == doctest::Approx((5.0 / 25.0) / (3.0 / 40.0)).epsilon(1e-14));

  // Plugging B back into the logit reproduces the benchmark allocation.
  const auto again = invert_investment_allocation(inv2, cap2, wkr2, 4.0);
  const auto alloc = allocate_investment({10.0}, again, cap2, wkr2, 4.0);
  for (int j = 0; j < 3; ++j) CHECK(rel(alloc(0, j), i[j]) < 1e-14);

  cap2(0, 1) = 0.0;
  CHECK_THROWS_AS(invert_investment_allocation(inv2, cap2, wkr2, 1.0), CalibrationError);
}

TEST_CASE("calibration is homogeneous in the benchmark values") {
  const double lambda = 3.0;
  auto toy = make_toy({3, 4, 42});
  auto scaled = toy.data;
  for (auto* a : {&scaled.output, &scaled.energy_elec, &scaled.energy_nelec, &scaled.capital_rent,
                  &scaled.tax_production, &scaled.household_consumption,
                  &scaled.government_consumption, &scaled.investment_demand,
                  &scaled.tax_consumption, &scaled.capital_stock})
    for (double& x : a->data()) x *= lambda;
  for (auto* a : {&scaled.intermediate, &scaled.wages, &scaled.trade, &scaled.margin})
    for (double& x : a->data()) x *= lambda;
  for (auto* v : {&scaled.tax_income, &scaled.household_wage_income,
                  &scaled.household_capital_income, &scaled.household_transfers,
                  &scaled.household_savings, &scaled.government_savings,
                  &scaled.foreign_transfers})
    for (double& x : *v) x *= lambda;

  const GrowthParams g = GrowthParams::defaults();
  const auto a = calibrate(toy.data, toy.dynamics, g, {});
  const auto s = calibrate(scaled, toy.dynamics, g, {});
  const auto& pa = a.params;
  const auto& ps = s.params;

  auto same = [](const std::vector<double>& x, const std::vector<double>& y, double factor) {
    REQUIRE(x.size() == y.size());
    for (std::size_t j = 0; j < x.size(); ++j)
      if (!(rel(x[j] * factor, y[j]) < 1e-12)) return false;
    return true;
  };
  for (std::size_t k = 0; k < pa.technology.size(); ++k) {
    const auto& t = pa.technology[k];
    const auto& u = ps.technology[k];
    for (auto [n, m] : {std::pair{&t.top, &u.top}, {&t.kle, &u.kle}, {&t.kl, &u.kl},
                        {&t.energy, &u.energy}, {&t.labour, &u.labour}}) {
      CHECK(n->sigma == m->sigma);
      CHECK(same(n->theta, m->theta, 1.0));
      CHECK(rel(n->ref_cost, m->ref_cost) < 1e-12);
    }
    CHECK(same(t.materials, u.materials, 1.0));
  }
  for (std::size_t k = 0; k < pa.trade.nests.size(); ++k) {
    CHECK(same(pa.trade.nests[k].top.theta, ps.trade.nests[k].top.theta, 1.0));
    CHECK(same(pa.trade.nests[k].origins.theta, ps.trade.nests[k].origins.theta, 1.0));
  }
  CHECK(same(pa.trade.margin.data(), ps.trade.margin.data(), 1.0));
  CHECK(same(pa.production_tax_rate.data(), ps.production_tax_rate.data(), 1.0));
  CHECK(same(pa.capital_per_stock.data(), ps.capital_per_stock.data(), 1.0));
  CHECK(same(pa.investment_attractor.data(), ps.investment_attractor.data(), 1.0));
  for (std::size_t r = 0; r < pa.regions.size(); ++r) {
    const auto& x = pa.regions[r];
    const auto& y = ps.regions[r];
    CHECK(same(x.household.mu, y.household.mu, lambda));
    CHECK(same(x.household.gamma, y.household.gamma, 1.0));
    CHECK(same(x.government.mu, y.government.mu, lambda));
    CHECK(same(x.government.gamma, y.government.gamma, 1.0));
    CHECK(same(x.consumption_tax_rate, y.consumption_tax_rate, 1.0));
    CHECK(same(x.investment_shares, y.investment_shares, 1.0));
    CHECK(same(x.labour_supply, y.labour_supply, lambda));
    CHECK(rel(x.household_rules.savings_rate, y.household_rules.savings_rate) < 1e-12);
    CHECK(rel(x.household_rules.income_tax_rate, y.household_rules.income_tax_rate) < 1e-12);
    CHECK(rel(x.benchmark_gdp * lambda, y.benchmark_gdp) < 1e-12);
  }
}

TEST_CASE("calibration errors") {
  CalibrationConfig cfg;
  cfg.nests.kl = 0.0;
  CHECK_THROWS_AS(cfg.check(), CalibrationError);
  cfg = {};
  cfg.frisch = -0.5;
  CHECK_THROWS_AS(cfg.check(), CalibrationError);
  cfg = {};
  cfg.subsistence_cap = 1.0;
  CHECK_THROWS_AS(cfg.check(), CalibrationError);
  cfg = {};
  cfg.armington_overrides["C26"] = -1.0;
  CHECK_THROWS_AS(cfg.check(), CalibrationError);

  auto data = make_toy({2, 2, 42}).data;
  data.energy_elec(1, 0) = 0.0;
  data.energy_nelec(1, 0) = 0.0;
  try {
    calibrate_ces_nests(data, {});
    FAIL("expected a calibration error");
  } catch (const CalibrationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("nest E") != std::string::npos);
    CHECK(msg.find("R02") != std::string::npos);
  }
}
