#include <cmath>
#include <numeric>

#include "doctest.h"
#include "support.hpp"

#include "sgem/benchmark.hpp"
#include "sgem/scenario.hpp"

using namespace sgem;
using test::rel;

namespace {

SimulationModel model_of(const test::Calibrated& b) { return {b.cal.params, b.start, {}, {}}; }

ExpenditureTable one_record(const std::string& region, SpendingCategory c, int year, double amount,
                            double cofunding) {
  ExpenditureTable t;
  t.records.push_back({region, "KIC", c, year, amount});
  t.assumptions[year] = {year, cofunding, 0.0, 0.0, 0.0};
  return t;
}

YearShocks empty_year(std::size_t R, std::size_t N) {
  return {Array2(R, N), std::vector<double>(R, 0.0), std::vector<double>(R, 0.0),
          std::vector<double>(R, 0.0), std::vector<double>(R, 0.0)};
}

/// Standard toy scenario on the 3-region bundle, run once for every test that needs it.
struct ToyScenarioRun {
  Scenario scenario;
  ShockSeries shocks;
  ScenarioRuns runs;
  EffectReport report;
};

const ToyScenarioRun& toy_run() {
  static const ToyScenarioRun run = [] {
    const auto& b = test::bundle("toy_3x4");
    ToyScenarioRun r;
    r.scenario = load_scenario(test::data_dir() / "toy_3x4" / "scenario" / "scenario.json");
    r.shocks = build_shocks(r.scenario.table, r.scenario.map, b.input.data, b.cal.params);
    const auto& dims = b.input.data.dims;
    r.runs = run_scenario(model_of(b), r.shocks, dims.last_year() - dims.first_year());
    r.report = decompose_effects(r.runs, r.shocks, dims, r.scenario.map);
    return r;
  }();
  return run;
}

}  // namespace

TEST_CASE("programme table category totals") {
  const auto s = load_scenario(test::data_dir() / "programme" / "scenario.json");
  const auto totals = s.table.category_totals();
  CHECK(totals.at(SpendingCategory::Business) == 826716365.0);
  CHECK(s.map.pattern_year == 2016);
  CHECK(s.map.total_budget == 3e9);
  CHECK(s.table.assumptions.at(2024).cofunding_rate == 0.2);
}

TEST_CASE("expenditure table validation") {
  CHECK(parse_spending_category("Research") == SpendingCategory::Research);
  CHECK_THROWS_AS(parse_spending_category("Marketing"), StructuralError);
  auto t = one_record("R01", SpendingCategory::Research, 2021, 10.0, 0.3);
  CHECK_NOTHROW(t.check());
  t.records[0].amount = -1.0;
  CHECK_THROWS_AS(t.check(), StructuralError);
  t.records[0].amount = 1.0;
  t.assumptions[2021].cofunding_rate = 1.2;
  CHECK_THROWS_AS(t.check(), StructuralError);
}

TEST_CASE("leverage rule on a single Research record") {
  const auto& b = test::bundle("toy_3x4");
  const auto& data = b.input.data;
  const auto& dims = data.dims;
  const int year = dims.first_year() + 1;
  const auto t = one_record("R02", SpendingCategory::Research, year, 100.0, 0.30);
  ShockMap map;
  std::vector<ShockAuditRow> audit;
  const auto shocks = build_shocks(t, map, data, b.cal.params, &audit);
  REQUIRE(shocks.years.size() == 1);
  const auto& ys = shocks.years.at(year);

  // Value-added weights over the research-intensive groups.
  const std::size_t r = 1;
  const double g = b.cal.params.dynamics.growth_rate[r];
  double va_groups = 0.0;
  for (std::size_t i = 0; i < dims.n_sectors(); ++i) {
    const auto grp = dims.group_of(i);
    if (grp == SectorGroup::HighTech || grp == SectorGroup::KnowledgeServices)
      va_groups += benchmark_value_added(data, r, i);
  }
  REQUIRE(va_groups > 0.0);

  double gross = 0.0, valued = 0.0;
  for (const auto& row : audit) {
    CHECK(row.region == "R02");
    CHECK(row.target == "rd");
    CHECK(row.source == "Research");
    const auto i = *dims.find_sector(row.sector);
    const double va = benchmark_value_added(data, r, i);
    CHECK(rel(row.gross, 130.0 * va / va_groups) < 1e-12);
    CHECK(rel(row.gross, 1.3 * row.amount) < 1e-12);
    gross += row.gross;
    valued += ys.rd(r, i) * va * (1.0 + g);
  }
  CHECK(rel(gross, 130.0) < 1e-12);
  CHECK(rel(valued, 130.0) < 1e-12);
  for (std::size_t q = 0; q < dims.n_regions(); ++q) {
    CHECK(ys.h[q] == 0.0);
    CHECK(ys.demand[q] == 0.0);
    CHECK(ys.levy[q] == 0.0);
    if (q != r)
      for (std::size_t i = 0; i < dims.n_sectors(); ++i) CHECK(ys.rd(q, i) == 0.0);
  }
  CHECK(ys.expenditure[r] == 100.0);
  const auto supported = shocks.tfp_supported(dims.n_regions());
  CHECK(supported == std::vector<bool>{false, true, false});
}

TEST_CASE("education spending at the cost of one point raises H by one point") {
  const auto& b = test::bundle("toy_3x4");
  const auto& data = b.input.data;
  const int year = data.dims.first_year();
  double wage_bill = 0.0;
  for (std::size_t i = 0; i < data.dims.n_sectors(); ++i)
    for (std::size_t e = 0; e < data.dims.n_skills(); ++e) wage_bill += data.wages(2, i, e);
  const auto t = one_record("R03", SpendingCategory::Education, year, 0.02 * wage_bill, 0.0);
  ShockMap map;
  CHECK_THROWS_AS(build_shocks(t, map, data, b.cal.params), StructuralError);
  map.h_cost_per_point = 0.02;
  const auto s = build_shocks(t, map, data, b.cal.params);
  CHECK(rel(s.years.at(year).h[2], 0.01) < 1e-12);
}

TEST_CASE("purchases are financed by GDP-proportional levies") {
  const auto& b = test::bundle("toy_3x4");
  const auto& data = b.input.data;
  const int year = data.dims.first_year() + 2;
  auto t = one_record("R01", SpendingCategory::Other, year, 50.0, 0.5);
  ShockMap map;
  map.financing_regions = {"R01", "R03"};
  const auto s = build_shocks(t, map, data, b.cal.params);
  const auto& ys = s.years.at(year);
  CHECK(ys.demand[0] == 50.0);  // not leveraged
  const double g1 = benchmark_gdp(data, 0), g3 = benchmark_gdp(data, 2);
  CHECK(rel(ys.levy[0], 50.0 * g1 / (g1 + g3)) < 1e-12);
  CHECK(ys.levy[1] == 0.0);
  CHECK(rel(ys.levy[0] + ys.levy[2], 50.0) < 1e-12);
  CHECK(s.tfp_supported(3) == std::vector<bool>(3, false));
}

TEST_CASE("pattern mode spreads yearly budgets by the base-year pattern") {
  const auto& b = test::bundle("toy_3x4");
  const auto& data = b.input.data;
  const int base = data.dims.first_year();
  const int year = base + 1;
  ExpenditureTable t;
  t.records = {{"R01", "K", SpendingCategory::Research, base, 30.0},
               {"R01", "K", SpendingCategory::Education, base, 10.0},
               {"R02", "K", SpendingCategory::Other, base, 60.0}};
  t.assumptions[year] = {year, 0.0, 0.1, 0.02, 0.005};
  ShockMap map;
  map.pattern_year = base;
  map.total_budget = 1000.0;
  map.h_cost_per_point = 0.02;
  std::vector<ShockAuditRow> audit;
  const auto s = build_shocks(t, map, data, b.cal.params, &audit);
  REQUIRE(s.years.size() == 1);
  const auto& ys = s.years.at(year);
  // kic 100 -> 30/10/60; direct 20 -> 15 R&D + 5 H in R01; admin 5 -> 2 and 3.
  CHECK(rel(ys.expenditure[0], 62.0) < 1e-12);
  CHECK(rel(ys.expenditure[1], 63.0) < 1e-12);
  CHECK(ys.expenditure[2] == 0.0);
  CHECK(rel(ys.demand[0], 2.0) < 1e-12);
  CHECK(rel(ys.demand[1], 63.0) < 1e-12);

  double research = 0.0, direct_rd = 0.0, direct_h = 0.0, education = 0.0;
  for (const auto& a : audit) {
    if (a.region != "R01") continue;
    if (a.source == "Research") research += a.amount;
    if (a.source == "direct" && a.target == "rd") direct_rd += a.amount;
    if (a.source == "direct" && a.target == "h") direct_h += a.amount;
    if (a.source == "Education") education += a.amount;
  }
  CHECK(rel(research, 30.0) < 1e-12);
  CHECK(rel(direct_rd, 15.0) < 1e-12);
  CHECK(rel(direct_h, 5.0) < 1e-12);
  CHECK(rel(education, 10.0) < 1e-12);
}

TEST_CASE("scenario input errors") {
  const auto& b = test::bundle("toy_3x4");
  const auto& data = b.input.data;
  auto t = one_record("XX", SpendingCategory::Research, 2021, 1.0, 0.0);
  t.records.push_back({"YY", "K", SpendingCategory::Other, 2021, 1.0});
  try {
    build_shocks(t, {}, data, b.cal.params);
    FAIL("expected a StructuralError");
  } catch (const StructuralError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("XX") != std::string::npos);
    CHECK(msg.find("YY") != std::string::npos);
  }
  auto missing = one_record("R01", SpendingCategory::Research, 2021, 1.0, 0.0);
  missing.records[0].year = 2022;
  CHECK_THROWS_WITH_AS(build_shocks(missing, {}, data, b.cal.params), doctest::Contains("2022"),
                       StructuralError);
  ShockMap bad;
  bad.rd_weights["R01"] = {{"C26", 0.5}, {"M72", 0.4}};
  CHECK_THROWS_AS(build_shocks(one_record("R01", SpendingCategory::Research, 2021, 1.0, 0.0), bad,
                               data, b.cal.params),
                  StructuralError);
}

TEST_CASE("explicit R&D weights override the default allocation") {
  const auto& b = test::bundle("toy_3x4");
  const auto& data = b.input.data;
  const int year = data.dims.first_year();
  ShockMap map;
  map.rd_weights["R01"] = {{"D35", 1.0}};
  const auto s = build_shocks(one_record("R01", SpendingCategory::Business, year, 10.0, 0.0), map,
                              data, b.cal.params);
  const auto d35 = *data.dims.find_sector("D35");
  const auto& rd = s.years.at(year).rd;
  for (std::size_t i = 0; i < data.dims.n_sectors(); ++i)
    CHECK((rd(0, i) != 0.0) == (i == d35));
  CHECK(rel(rd(0, d35) * benchmark_value_added(data, 0, d35), 10.0) < 1e-12);
}

TEST_CASE("channel lists") {
  CHECK(parse_channels("tfp,demand") == ChannelSet{true, true});
  CHECK(parse_channels(" demand ") == ChannelSet{false, true});
  CHECK(parse_channels("tfp") == ChannelSet{true, false});
  CHECK(parse_channels("") == ChannelSet{});
  CHECK_THROWS_AS(parse_channels("tfp,prices"), StructuralError);
}

TEST_CASE("scenario files round trip") {
  auto s = load_scenario(test::data_dir() / "toy_3x4" / "scenario" / "scenario.json");
  s.map.financing_regions = {"R01"};
  s.map.rd_weights["R02"] = {{"C26", 0.25}, {"M72", 0.75}};
  const auto path = save_scenario(test::scratch("scenario_io"), s);
  const auto back = load_scenario(path);
  REQUIRE(back.table.records.size() == s.table.records.size());
  for (std::size_t k = 0; k < s.table.records.size(); ++k) {
    CHECK(back.table.records[k].amount == s.table.records[k].amount);
    CHECK(back.table.records[k].category == s.table.records[k].category);
    CHECK(back.table.records[k].region == s.table.records[k].region);
  }
  CHECK(back.table.assumptions.size() == s.table.assumptions.size());
  CHECK(back.map.h_cost_per_point == s.map.h_cost_per_point);
  CHECK(back.map.currency_scale == s.map.currency_scale);
  CHECK(back.map.rd_weights == s.map.rd_weights);
  CHECK(back.map.financing_regions == s.map.financing_regions);
  CHECK(back.map.rd_groups == s.map.rd_groups);
}

TEST_CASE("zero expenditure leaves the baseline untouched") {
  const auto& b = test::bundle("toy_3x4");
  const auto m = model_of(b);
  ExpenditureTable empty;
  ShockMap map;
  const auto shocks = build_shocks(empty, map, b.input.data, b.cal.params);
  CHECK(shocks.zero());
  const auto base = run_baseline(m, 6);
  for (auto ch : {ChannelSet{}, ChannelSet{true, false}, ChannelSet{false, true}, ChannelSet{true, true}}) {
    const auto cf = run_counterfactual(m, shocks, 6, ch);
    REQUIRE(cf.states.size() == base.states.size());
    for (std::size_t t = 0; t < cf.states.size(); ++t) CHECK(cf.states[t] == base.states[t]);
  }
  const auto rep = decompose_effects({base, base, base, base}, shocks, b.input.data.dims, map);
  for (const auto& row : rep.rows) {
    CHECK(row.direct == 0.0);
    CHECK(row.total == 0.0);
    CHECK(row.demand == 0.0);
    CHECK(row.structural == 0.0);
    CHECK(row.interaction == 0.0);
  }
  CHECK(std::isnan(rep.total_direct_ratio));
}

TEST_CASE("baseline paths") {
  SUBCASE("stationary toy stays flat") {
    ToySpec spec;
    spec.regions = 3;
    spec.sectors = 3;
    spec.seed = 21;
    auto b = test::calibrate_toy(spec);
    b.cal.params.growth.enabled = false;
    const auto path = run_baseline(model_of(b), 10);
    for (const auto& s : path.states)
      for (std::size_t r = 0; r < 3; ++r)
        CHECK(rel(s.gdp_real[r], path.states.front().gdp_real[r]) < 1e-8);
  }
  SUBCASE("benchmark year reproduces the data") {
    const auto& b = test::bundle("toy_10x6");
    const auto path = run_baseline(model_of(b), 0);
    REQUIRE(path.states.size() == 1);
    for (std::size_t r = 0; r < b.input.data.dims.n_regions(); ++r)
      CHECK(rel(path.states[0].gdp[r], benchmark_gdp(b.input.data, r)) < 1e-10);
    CHECK(path.reports[0].iterations <= 2);
  }
  SUBCASE("R&D intensity converges monotonically to its long-run mean") {
    const auto& b = test::bundle("toy_3x4");
    const auto& dims = b.input.data.dims;
    const auto path = run_baseline(model_of(b), 20);
    for (std::size_t r = 0; r < dims.n_regions(); ++r)
      for (std::size_t i = 0; i < dims.n_sectors(); ++i) {
        const auto& proc = b.cal.params.growth.rd_process(dims.group_of(i));
        const double lr = proc.c / (1.0 - proc.a);
        for (std::size_t t = 1; t < path.states.size(); ++t) {
          const double before = path.states[t - 1].rd(r, i) - lr;
          const double after = path.states[t].rd(r, i) - lr;
          CHECK(before * after >= 0.0);
          CHECK(std::abs(after) <= std::abs(before));
        }
      }
  }
  SUBCASE("horizon beyond the model years") {
    const auto& b = test::bundle("toy_2x2");
    const auto& dims = b.input.data.dims;
    CHECK_THROWS_AS(run_baseline(model_of(b), dims.last_year() - dims.first_year() + 1), StructuralError);
  }
}

TEST_CASE("an R&D shock in the leader region raises its GDP") {
  const auto& b = test::bundle("toy_3x4");
  const auto& dims = b.input.data.dims;
  const auto R = dims.n_regions(), N = dims.n_sectors();
  const int year = dims.first_year() + 2;
  ShockSeries shocks;
  auto ys = empty_year(R, N);
  for (std::size_t i = 0; i < N; ++i) ys.rd(0, i) = 0.01;
  shocks.years.emplace(year, ys);
  const auto m = model_of(b);
  const auto base = run_baseline(m, 12);
  const auto cf = run_counterfactual(m, shocks, 12, {true, false});
  for (std::size_t t = 0; t < base.states.size(); ++t) {
    const int y = base.states[t].year;
    const double dev = cf.states[t].gdp_real[0] - base.states[t].gdp_real[0];
    CAPTURE(y);
    if (y <= year) CHECK(dev == 0.0);  // the shock feeds next year's growth
    else CHECK(dev > 0.0);
  }
  CHECK_THROWS_AS(run_counterfactual(m, shocks, 1, {true, false}), StructuralError);
}

TEST_CASE("standard toy scenario decomposition") {
  const auto& run = toy_run();
  const auto& rep = run.report;
  const auto& dims = test::bundle("toy_3x4").input.data.dims;
  const auto R = dims.n_regions();
  const auto T = run.runs.baseline.states.size();
  REQUIRE(rep.rows.size() == R * T);

  std::size_t supported = 0;
  bool spillover = false;
  for (std::size_t r = 0; r < R; ++r) {
    supported += rep.supported[r] ? 1 : 0;
    CumulativeEffect sum;
    for (std::size_t t = 0; t < T; ++t) {
      const auto& row = rep.rows[r * T + t];
      CHECK(row.region == dims.regions()[r]);
      CHECK(row.interaction == row.total - row.demand - row.structural);
      if (!rep.supported[r]) {
        CHECK(row.direct == 0.0);
        if (row.total != 0.0) spillover = true;
      }
      sum.expenditure += row.expenditure;
      sum.direct += row.direct;
      sum.total += row.total;
      sum.demand += row.demand;
      sum.structural += row.structural;
      sum.interaction += row.interaction;
    }
    const auto& c = rep.cumulative[r];
    const double scale = std::max(1.0, std::abs(c.total));
    CHECK(std::abs(sum.expenditure - c.expenditure) <= 1e-12 * std::max(1.0, c.expenditure));
    CHECK(std::abs(sum.direct - c.direct) <= 1e-12 * scale);
    CHECK(std::abs(sum.total - c.total) <= 1e-12 * scale);
    CHECK(std::abs(sum.demand - c.demand) <= 1e-12 * scale);
    CHECK(std::abs(sum.structural - c.structural) <= 1e-12 * scale);
    CHECK(std::abs(sum.interaction - c.interaction) <= 1e-12 * scale);
  }
  CHECK(supported > 0);
  CHECK(supported < R);
  CHECK(spillover);
  CHECK(rep.aggregate_total.direct > 0.0);
  // The sign of the spillover is a model outcome; only the ratio's definition is fixed.
  CHECK(rep.total_direct_ratio == rep.aggregate_total.total / rep.aggregate_total.direct);

  // Every run solved every year to tolerance, with Walras law holding.
  for (const auto* p : {&run.runs.baseline, &run.runs.tfp, &run.runs.demand, &run.runs.full})
    for (const auto& rpt : p->reports) {
      CHECK(rpt.max_residual < 1e-8);
      CHECK(std::abs(rpt.walras) < 1e-8);
    }

  // Report files.
  const auto dir = test::scratch("effects");
  write_effect_report(dir, rep);
  for (const char* f : {"effects.csv", "cumulative.csv", "plot_data.csv", "region_values.json"})
    CHECK(std::filesystem::exists(dir / f));
  const auto cum = read_csv(dir / "cumulative.csv");
  CHECK(cum.header == std::vector<std::string>{"region", "expenditure", "direct_effect", "total_effect"});
  CHECK(cum.rows.size() == R + 1);
}

TEST_CASE("runs of different lengths are rejected") {
  const auto& run = toy_run();
  auto runs = run.runs;
  runs.demand.states.pop_back();
  const auto& dims = test::bundle("toy_3x4").input.data.dims;
  CHECK_THROWS_AS(decompose_effects(runs, run.shocks, dims, run.scenario.map), StructuralError);
}

TEST_CASE("scenario runs are deterministic") {
  const auto& b = test::bundle("toy_3x4");
  const auto& run = toy_run();
  const auto again = run_scenario(model_of(b), run.shocks, 8);
  for (std::size_t t = 0; t < again.full.states.size(); ++t) {
    CHECK(again.full.states[t] == run.runs.full.states[t]);
    CHECK(again.tfp.states[t] == run.runs.tfp.states[t]);
  }
}
