#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"

#include "sgem/estimation.hpp"

using namespace sgem;
using test::rel;

namespace {

PanelObservation obs(std::string c, std::string s, int y, double tfp, double h, double rd) {
  return {std::move(c), std::move(s), y, tfp, h, rd};
}

GrowthCoefficients truth_of(const Json& j) {
  const auto& c = j.at("coefficients");
  return {c.at("b1"), c.at("b2"), c.at("b3"), c.at("b4"), c.at("b5"), c.at("b6")};
}

const PanelDataset& bundled_panel() {
  static const auto p = read_panel_csv(test::data_dir() / "panel" / "panel.csv");
  return p;
}

/// AR(1) panel drawn in the test: RD' = a RD + c + e.
PanelDataset ar1_panel(double a, double c, double sd, std::size_t units, int years,
                       std::uint64_t seed) {
  ToyRng rng(seed);
  PanelDataset p;
  for (std::size_t u = 0; u < units; ++u) {
    const std::string name = "U" + std::to_string(u);
    double rd = rng.uniform(0.0, 0.1);
    for (int t = 0; t < years; ++t) {
      p.observations.push_back(obs(name, "C26", 2000 + t, 1.0, 0.3, rd));
      rd = std::max(0.0, a * rd + c + sd * rng.normal());
    }
  }
  return p;
}

}  // namespace

TEST_CASE("regressors by hand") {
  PanelDataset p;
  p.observations = {
      obs("A", "C26", 2000, 2.0, 0.30, 0.020), obs("A", "C26", 2001, 2.2, 0.32, 0.025),
      obs("A", "C26", 2002, 2.5, 0.33, 0.030), obs("B", "C26", 2000, 1.0, 0.10, 0.010),
      obs("B", "C26", 2001, 1.3, 0.12, 0.012),
  };
  const auto d = build_regressors(p);
  REQUIRE(d.rows.size() == 3);
  CHECK(d.dropped_units == 0);
  for (const auto& r : d.rows) {
    const bool a = d.countries[r.country] == "A";
    CHECK(r.frontier == a);
    if (a) CHECK(r.gap == 0.0);
  }
  const auto it = std::find_if(d.rows.begin(), d.rows.end(),
                               [&](const DesignRow& r) { return d.countries[r.country] == "B"; });
  REQUIRE(it != d.rows.end());
  const auto& b = *it;
  CHECK(b.year == 2001);
  CHECK(b.growth == doctest::Approx(std::log(1.3)).epsilon(1e-15));
  CHECK(b.frontier_growth == doctest::Approx(std::log(1.1)).epsilon(1e-15));
  CHECK(b.gap == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(b.h == 0.10);
  CHECK(b.rd == 0.010);
  CHECK(b.h_gap == doctest::Approx(0.10 * std::log(0.5)).epsilon(1e-15));
  CHECK(b.rd_gap == doctest::Approx(0.010 * std::log(0.5)).epsilon(1e-15));

  PanelDataset flat;
  for (const char* c : {"A", "B"})
    for (int y = 2000; y < 2004; ++y) flat.observations.push_back(obs(c, "A01", y, 1.7, 0.2, 0.01));
  for (const auto& r : build_regressors(flat).rows) {
    CHECK(r.growth == 0.0);
    CHECK(r.frontier_growth == 0.0);
  }

  // A unit without two consecutive years is dropped and counted.
  p.observations.push_back(obs("C", "C26", 2000, 1.0, 0.1, 0.01));
  p.observations.push_back(obs("C", "C26", 2002, 1.1, 0.1, 0.01));
  CHECK(build_regressors(p).dropped_units == 1);
}

TEST_CASE("panel validation") {
  PanelDataset p;
  p.observations = {obs("A", "C26", 2000, 1.0, 0.3, 0.01)};
  CHECK_NOTHROW(p.check());
  p.observations.push_back(obs("A", "C26", 2000, 1.2, 0.3, 0.01));
  CHECK_THROWS_AS(p.check(), StructuralError);
  p.observations = {obs("A", "C26", 2000, 0.0, 0.3, 0.01)};
  CHECK_THROWS_AS(p.check(), StructuralError);
  p.observations = {obs("A", "C26", 2000, 1.0, 1.3, 0.01)};
  CHECK_THROWS_AS(p.check(), StructuralError);
  p.observations = {obs("A", "C26", 2000, 1.0, 0.3, -0.01)};
  CHECK_THROWS_AS(p.check(), StructuralError);
  CHECK(bundled_panel().balanced());
}

TEST_CASE("LSDV recovers the generator coefficients") {
  const auto truth = truth_of(read_json(test::data_dir() / "panel" / "truth.json"));
  const auto& panel = bundled_panel();
  const auto d = build_regressors(panel);
  const auto fit = fit_lsdv(d, {true, true, false});
  const auto est = fit.growth_coefficients().as_array();
  const auto want = truth.as_array();
  for (std::size_t k = 0; k < 6; ++k) {
    CAPTURE(k);
    CHECK(fit.se[k] > 0.0);
    CHECK(std::abs(est[k] - want[k]) < 2.0 * fit.se[k]);
  }
  std::size_t used = 0;
  for (const auto& r : d.rows) used += r.frontier ? 0 : 1;
  CHECK(fit.observations == used);
  CHECK(used == 27 * 6 * 20);
  CHECK(fit.r2_adj < 1.0);

  const auto exact = read_panel_csv(test::data_dir() / "panel_exact" / "panel.csv");
  const auto efit = fit_lsdv(build_regressors(exact), {true, true, false});
  const auto eest = efit.growth_coefficients().as_array();
  for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs(eest[k] - want[k]) < 1e-8);
  CHECK(efit.r2_adj == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("richer dummy sets fit at least as well") {
  const auto d = build_regressors(bundled_panel());
  const auto s = fit_lsdv(d, {true, false, false});
  const auto sc = fit_lsdv(d, {true, true, false});
  const auto sct = fit_lsdv(d, {true, true, true});
  CHECK(sc.r2_adj >= s.r2_adj);
  CHECK(sct.rss <= sc.rss);
  CHECK(sc.parameters > s.parameters);
  CHECK(sct.parameters > sc.parameters);
}

TEST_CASE("within estimator equals LSDV with unit dummies") {
  const auto& panel = bundled_panel();
  // An unbalanced version: drop a pseudo-random tenth of the rows.
  PanelDataset thinned;
  ToyRng rng(8);
  for (const auto& o : panel.observations)
    if (rng.uniform() > 0.1) thinned.observations.push_back(o);
  for (const PanelDataset* p : {&panel, static_cast<const PanelDataset*>(&thinned)}) {
    const auto d = build_regressors(*p);
    const auto a = fit_lsdv(d, {false, true, false});
    const auto w = fit_within(d);
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(std::abs(a.coef[k] - w.coef[k]) < 1e-10);
      CHECK(rel(a.se[k], w.se[k]) < 1e-8);
    }
    CHECK(a.observations == w.observations);
  }
}

TEST_CASE("estimates do not depend on row order") {
  auto shuffled = bundled_panel();
  std::mt19937_64 g(5);
  std::shuffle(shuffled.observations.begin(), shuffled.observations.end(), g);
  const auto a = fit_lsdv(build_regressors(bundled_panel()), {true, true, false});
  const auto b = fit_lsdv(build_regressors(shuffled), {true, true, false});
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(std::abs(a.coef[k] - b.coef[k]) < 1e-12);
    CHECK(rel(a.se[k], b.se[k]) < 1e-10);
  }
  CHECK(a.r2_adj == doctest::Approx(b.r2_adj).epsilon(1e-12));
  const auto ra = fit_ar1(bundled_panel());
  const auto rb = fit_ar1(shuffled);
  CHECK(std::abs(ra.process.a - rb.process.a) < 1e-12);
}

TEST_CASE("collinear designs are rejected by name") {
  auto p = bundled_panel();
  for (auto& o : p.observations) o.h = 0.0;
  try {
    fit_lsdv(build_regressors(p), {true, true, false});
    FAIL("expected a NumericalError");
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("collinear") != std::string::npos);
    CHECK((msg.find("b3") != std::string::npos || msg.find("b4") != std::string::npos));
  }
}

TEST_CASE("AR(1) estimation") {
  const auto hit = fit_ar1(ar1_panel(0.976, 0.00129, 1e-4, 60, 25, 1));
  CHECK(std::abs(hit.process.a - 0.976) < 2.0 * hit.se_a);
  CHECK(std::abs(hit.process.c - 0.00129) < 2.0 * hit.se_c);
  CHECK(hit.long_run == doctest::Approx(hit.process.c / (1.0 - hit.process.a)));
  CHECK_FALSE(hit.near_collinear);

  const auto zero = fit_ar1(ar1_panel(0.0, 0.02, 0.002, 40, 20, 2));
  CHECK(std::abs(zero.process.a) < 2.0 * zero.se_a);

  PanelDataset constant;
  for (const char* c : {"A", "B"})
    for (int y = 2000; y < 2010; ++y) constant.observations.push_back(obs(c, "C26", y, 1.0, 0.3, 0.02));
  CHECK(fit_ar1(constant).near_collinear);

  PanelDataset short_panel;
  for (const char* c : {"A", "B"})
    for (int y = 2000; y < 2002; ++y) short_panel.observations.push_back(obs(c, "C26", y, 1.0, 0.3, 0.02));
  CHECK_THROWS_AS(fit_ar1(short_panel), StructuralError);

  const auto truth = read_json(test::data_dir() / "panel" / "truth.json").at("rd_process");
  const SyntheticPanel synth = make_panel({});
  const auto by_group = fit_ar1_by_group(bundled_panel(), synth.groups);
  for (const auto& [g, fit] : by_group) {
    CAPTURE(to_string(g));
    const auto& t = truth.at(std::string(to_string(g)));
    CHECK(std::abs(fit.process.a - t.at("a").get<double>()) < 3.0 * fit.se_a);
  }
}

TEST_CASE("the synthetic panel generator is deterministic") {
  PanelSpec spec;
  spec.countries = 5;
  spec.sectors = 2;
  spec.years = 6;
  const auto a = make_panel(spec);
  const auto b = make_panel(spec);
  REQUIRE(a.panel.observations.size() == 5 * 2 * 6);
  for (std::size_t k = 0; k < a.panel.observations.size(); ++k) {
    CHECK(a.panel.observations[k].tfp == b.panel.observations[k].tfp);
    CHECK(a.panel.observations[k].rd == b.panel.observations[k].rd);
  }
  const auto dir = test::scratch("panel_io");
  write_panel_csv(dir / "p.csv", a.panel);
  const auto back = read_panel_csv(dir / "p.csv");
  for (std::size_t k = 0; k < back.observations.size(); ++k) {
    CHECK(back.observations[k].tfp == a.panel.observations[k].tfp);
    CHECK(back.observations[k].h == a.panel.observations[k].h);
  }
}
