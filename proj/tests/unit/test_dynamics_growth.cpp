#include <cmath>

#include "doctest.h"
#include "support.hpp"

#include "sgem/dynamics.hpp"
#include "sgem/growth.hpp"

using namespace sgem;
using test::rel;

TEST_CASE("capital accumulation") {
  CHECK(capital_update(100.0, 0.05, 10.0) == doctest::Approx(105.0).epsilon(1e-15));
  CHECK(capital_update(80.0, 0.05, 0.05 * 80.0) == doctest::Approx(80.0).epsilon(1e-15));
  CHECK(capital_update(80.0, 1.0, 0.0) == 0.0);
  CHECK(capital_update(80.0, 0.0, 0.0) == 80.0);
}

TEST_CASE("capital remuneration rate") {
  CHECK(capital_remuneration(0.1, 1.0, 0.02, 0.05) == doctest::Approx(0.007).epsilon(1e-14));
  CHECK(capital_remuneration(0.0, 1.3, 0.02, 0.05) == 0.0);
  CHECK(capital_remuneration(0.2, 2.0, 0.02, 0.05) ==
        doctest::Approx(capital_remuneration(0.1, 1.0, 0.02, 0.05)).epsilon(1e-15));
  CHECK(capital_remuneration(0.1, 1.0, 0.02, 0.05, WkrForm::Ratio) ==
        doctest::Approx(0.1 / 0.07).epsilon(1e-14));
}

TEST_CASE("logit investment allocation") {
  Array2 b(1, 2, 1.0), k(1, 2, 10.0), w(1, 2, 0.03);
  auto i = allocate_investment({100.0}, b, k, w, 2.0);
  CHECK(i(0, 0) == doctest::Approx(50.0).epsilon(1e-15));
  CHECK(i(0, 1) == doctest::Approx(50.0).epsilon(1e-15));

  w(0, 0) = 0.10;
  w(0, 1) = 0.05;
  i = allocate_investment({100.0}, b, k, w, 2.0);
  CHECK(std::round(i(0, 0) * 100.0) / 100.0 == 52.50);
  CHECK(std::round(i(0, 1) * 100.0) / 100.0 == 47.50);
  const double e0 = std::exp(0.2), e1 = std::exp(0.1);
  CHECK(rel(i(0, 0), 100.0 * e0 / (e0 + e1)) < 1e-14);

  // theta = 0: shares follow B K only.
  b(0, 0) = 3.0;
  k(0, 1) = 20.0;
  i = allocate_investment({100.0}, b, k, w, 0.0);
  CHECK(i(0, 0) == doctest::Approx(60.0).epsilon(1e-14));

  // Adding a constant to every rate of a region leaves the shares alone.
  ToyRng rng(4);
  Array2 bb(3, 4), kk(3, 4), ww(3, 4);
  for (auto* a : {&bb, &kk, &ww})
    for (double& v : a->data()) v = rng.uniform(0.1, 2.0);
  const std::vector<double> pools{5.0, 0.0, 12.5};
  const auto base = allocate_investment(pools, bb, kk, ww, 3.0);
  auto shifted = ww;
  for (std::size_t j = 0; j < 4; ++j) shifted(2, j) += 0.7;
  const auto moved = allocate_investment(pools, bb, kk, shifted, 3.0);
  for (std::size_t j = 0; j < 4; ++j) CHECK(rel(moved(2, j), base(2, j)) < 1e-13);

  // Savings are exhausted, region by region or pooled.
  for (std::size_t r = 0; r < 3; ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < 4; ++j) s += base(r, j);
    CHECK(s == doctest::Approx(pools[r]).epsilon(1e-15));
  }
  const auto pooled = allocate_investment(pools, bb, kk, ww, 3.0, AllocationScope::Pooled);
  double total = 0.0;
  for (double v : pooled.data()) total += v;
  CHECK(total == doctest::Approx(17.5).epsilon(1e-15));
  CHECK(pooled(1, 0) > 0.0);

  const auto none = allocate_investment({0.0, 0.0, 0.0}, bb, kk, ww, 3.0);
  for (double v : none.data()) CHECK(v == 0.0);
  Array2 dead(1, 2, 0.0);
  CHECK_THROWS_AS(allocate_investment({1.0}, dead, k, w, 1.0), DomainError);
}

namespace {

struct Path {
  std::vector<EconomyState> states;
};

/// Solve-and-step loop; `shock` edits the exogenous state of a given year before the solve.
template <class Edit>
Path simulate(const test::Calibrated& b, const ParameterSet& p, int years, Edit shock) {
  Path path;
  auto s = b.start;
  for (int t = 0; t <= years; ++t) {
    shock(t, s);
    auto solved = solve_period(s, p, ClosureSpec{}, {}).state;
    path.states.push_back(solved);
    s = step_period(solved, p, nullptr);
  }
  return path;
}

}  // namespace

TEST_CASE("the stationary toy stays put") {
  const auto& b = test::bundle("toy_2x2");
  auto p = b.cal.params;
  p.growth.enabled = false;
  const auto path = simulate(b, p, 5, [](int, EconomyState&) {});
  for (const auto& s : path.states) {
    for (std::size_t k = 0; k < s.capital.data().size(); ++k)
      CHECK(rel(s.capital.data()[k], b.start.capital.data()[k]) < 1e-8);
    for (std::size_t k = 0; k < s.output.data().size(); ++k)
      CHECK(rel(s.output.data()[k], b.start.output.data()[k]) < 1e-8);
    for (double v : s.pd.data()) CHECK(std::abs(v - 1.0) < 1e-8);
  }
  // Zero depreciation and zero savings keep the stock as it is.
  auto q = p;
  for (double& d : q.dynamics.depreciation) d = 0.0;
  auto s = path.states.front();
  for (double& v : s.savings) v = 0.0;
  const auto next = step_period(s, q, nullptr);
  CHECK(next.capital == s.capital);
}

TEST_CASE("capital returns monotonically after a one-period TFP shock") {
  const auto& b = test::bundle("toy_3x4");
  auto p = b.cal.params;
  p.growth.enabled = false;
  const int years = 25;
  const auto base = simulate(b, p, years, [](int, EconomyState&) {});
  const auto shocked = simulate(b, p, years, [&](int t, EconomyState& s) {
    if (t == 1) s.tfp(1, 2) *= 1.2;
    if (t == 2) s.tfp(1, 2) = b.start.tfp(1, 2);
  });
  double prev = std::numeric_limits<double>::infinity();
  for (int t = 2; t <= years; ++t) {
    const double dev = std::abs(shocked.states[t].capital(1, 2) - base.states[t].capital(1, 2));
    CHECK(dev <= prev);
    prev = dev;
  }
  CHECK(prev < std::abs(shocked.states[2].capital(1, 2) - base.states[2].capital(1, 2)));
  for (const auto& s : shocked.states)
    for (double k : s.capital.data()) CHECK(k >= 0.0);
  // Savings pools are fully invested every period.
  for (std::size_t t = 0; t + 1 < shocked.states.size(); ++t) {
    const auto next = step_period(shocked.states[t], p, nullptr);
    for (std::size_t r = 0; r < p.dims.n_regions(); ++r) {
      double s = 0.0;
      for (std::size_t i = 0; i < p.dims.n_sectors(); ++i) s += next.sector_investment(r, i);
      CHECK(rel(s, shocked.states[t].savings[r]) < 1e-14);
    }
  }
}

TEST_CASE("published growth coefficients") {
  const auto g = GrowthParams::defaults();
  CHECK(g.pooled == GrowthCoefficients{0.100, -0.47, 0.027, 0.29, 0.26, 0.47});
  CHECK(g.pooled_rd == RnDProcess{0.976, 0.00129});
  CHECK(g.coefficients(SectorGroup::Traditional).b1 == 0.24);
  CHECK(g.coefficients(SectorGroup::KnowledgeServices).b2 == -0.077);
  CHECK(g.rd_process(SectorGroup::Traditional) == RnDProcess{0.990, 0.000278});
  CHECK(g.warnings().empty());
  auto bad = g;
  bad.by_group[0].b2 = 0.1;
  CHECK(bad.warnings().size() == 1);
}

TEST_CASE("growth equation arithmetic") {
  const auto k = GrowthParams::defaults().pooled;
  CHECK(std::abs(tfp_growth(-0.2, 0.01, 0.3, 0.03, k) - 0.09068) < 1e-10);
  CHECK(tfp_growth(0.0, 0.013, 0.0, 0.0, k) == k.b1 * 0.013);
  CHECK(tfp_growth(0.0, 0.0, 0.4, 0.02, k) == doctest::Approx(k.b3 * 0.4 + k.b5 * 0.02));

  const RnDProcess pooled{0.976, 0.00129};
  CHECK(std::abs(long_run_rd(pooled) - 0.05375) < 1e-10);
  CHECK(std::abs(rd_step(0.05375, pooled) - 0.05375) < 1e-10);
  CHECK(rd_step(0.3, {0.0, 0.004}) == 0.004);
  CHECK(std::abs(rd_step(0.009, {0.990, 0.000278}) - 0.009188) < 1e-12);
  CHECK(long_run_rd({0.5, 0.0}) == 0.0);
  CHECK(long_run_rd({0.5, 0.5}) == 1.0);
  CHECK_THROWS_AS(long_run_rd({1.0, 0.1}), DomainError);

  for (double start : {0.0, 0.25, 0.5, 1.0}) {
    double rd = start;
    for (int t = 0; t < 300; ++t) rd = rd_step(rd, pooled);
    CHECK(std::abs(rd - long_run_rd(pooled)) < 1e-3);
  }
}

TEST_CASE("frontier and gaps") {
  Array2 equal(3, 2, 1.5);
  const auto flat = tfp_gaps(equal);
  for (double g : flat.data()) CHECK(g == 0.0);
  Array2 a(3, 1, 1.0);
  a(1, 0) = 2.0;
  CHECK(frontier_level(a, 0) == 2.0);
  const auto gaps = tfp_gaps(a);
  CHECK(gaps(0, 0) == doctest::Approx(std::log(0.5)));
  CHECK(gaps(1, 0) == 0.0);
  Array2 later = a;
  later(1, 0) = 2.2;
  CHECK(frontier_growth(a, later, 0) == doctest::Approx(std::log(1.1)));
}

TEST_CASE("TFP update") {
  const auto params = GrowthParams::defaults();
  const auto& b = test::bundle("toy_10x6");
  const auto& dims = b.cal.params.dims;
  const auto R = dims.n_regions();
  const auto N = dims.n_sectors();

  // Everyone at a static frontier with no R&D or skills: nothing moves.
  GrowthState flat{Array2(R, N, 1.3), Array2(R, N), std::vector<double>(R, 0.0)};
  const auto same = apply_growth(flat, nullptr, dims, params);
  for (double v : same.tfp.data()) CHECK(v == doctest::Approx(1.3).epsilon(1e-15));

  GrowthState now{b.start.tfp, b.start.rd, b.start.human_capital};
  GrowthState s = now;
  for (int t = 0; t < 40; ++t) {
    s = apply_growth(s, nullptr, dims, params);
    const auto gaps = tfp_gaps(s.tfp);
    for (std::size_t i = 0; i < N; ++i) {
      double top = -1.0;
      for (std::size_t r = 0; r < R; ++r) {
        CHECK(gaps(r, i) <= 0.0);
        top = std::max(top, gaps(r, i));
      }
      CHECK(top == 0.0);
    }
  }

  // An R&D impulse helps wherever b5 + b6 gap > 0.
  const auto gaps0 = tfp_gaps(now.tfp);
  const auto base = apply_growth(now, nullptr, dims, params);
  for (std::size_t r : {std::size_t{0}, std::size_t{4}}) {
    for (std::size_t i = 0; i < N; ++i) {
      GrowthShocks sh{Array2(R, N), std::vector<double>(R, 0.0)};
      sh.rd(r, i) = 0.01;
      const auto up = apply_growth(now, &sh, dims, params);
      const auto& k = params.coefficients(dims.group_of(i));
      const double slope = k.b5 + k.b6 * gaps0(r, i);
      const double own = std::log(up.tfp(r, i) / now.tfp(r, i)) -
                         std::log(base.tfp(r, i) / now.tfp(r, i));
      if (slope > 0.0) CHECK(own > 0.0);
      // The impulse does not carry into the private R&D state.
      CHECK(up.rd(r, i) == base.rd(r, i));
    }
  }

  // Skills shocks are permanent and capped at one.
  GrowthShocks hs{Array2(), std::vector<double>(R, 0.0)};
  hs.h[2] = 2.0;
  const auto capped = apply_growth(now, &hs, dims, params);
  CHECK(capped.h[2] == 1.0);
  CHECK(apply_growth(capped, nullptr, dims, params).h[2] == 1.0);
}

TEST_CASE("followers close the gap under a static frontier") {
  const auto k = GrowthParams::defaults().pooled;
  const auto& b = test::bundle("toy_10x6");
  for (std::size_t r = 0; r < b.start.human_capital.size(); ++r)
    for (std::size_t i = 0; i < b.start.rd.cols(); ++i) {
      const double f = gap_contraction_factor(k, b.start.human_capital[r], b.start.rd(r, i));
      CHECK(std::abs(f) < 1.0);
    }
  // Two regions, the leader frozen (b1 = 0 and no drift at the frontier).
  Dimensions dims({"L", "F"}, {"C26"}, {"all"}, {{"C26", SectorGroup::HighTech}}, 2020, 2030);
  GrowthParams gp;
  gp.pooled = k;
  gp.pooled.b1 = 0.0;
  gp.pooled.b3 = 0.0;
  gp.pooled.b5 = 0.0;
  gp.by_group.fill(gp.pooled);
  gp.rd_by_group.fill({0.0, 0.02});
  GrowthState s{Array2(2, 1, 1.0), Array2(2, 1, 0.02), {0.3, 0.3}};
  s.tfp(1, 0) = std::exp(-0.5);
  double gap = -0.5;
  for (int t = 0; t < 30; ++t) {
    s = apply_growth(s, nullptr, dims, gp);
    CHECK(s.tfp(0, 0) == 1.0);
    const double g = std::log(s.tfp(1, 0));
    CHECK(g > gap);
    CHECK(g <= 0.0);
    CHECK(g == doctest::Approx(gap * gap_contraction_factor(gp.pooled, 0.3, 0.02)).epsilon(1e-12));
    gap = g;
  }
}
