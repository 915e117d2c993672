#include "sgem/state.hpp"

#include "sgem/calibration.hpp"
#include "sgem/equilibrium.hpp"

namespace sgem {

EconomyState empty_state(const ParameterSet& p) {
  const auto R = p.dims.n_regions();
  const auto N = p.dims.n_sectors();
  const auto S = p.dims.n_skills();
  EconomyState s;
  for (Array2* a : {&s.capital, &s.tfp, &s.rd, &s.rd_shock, &s.pd, &s.pa, &s.pm, &s.rent,
                    &s.output, &s.absorption, &s.domestic, &s.imports, &s.household,
                    &s.government, &s.sector_investment})
    *a = Array2(R, N);
  s.labour_supply = Array2(R, S);
  s.wage = Array2(R, S);
  s.flows = Array3(R, R, N);
  for (auto* v : {&s.human_capital, &s.nominal_scale, &s.demand_shock, &s.levy, &s.pi,
                  &s.investment, &s.household_income, &s.income_tax, &s.household_savings,
                  &s.consumption_budget, &s.tax_revenue, &s.government_savings,
                  &s.government_budget, &s.savings, &s.gdp, &s.gdp_real})
    v->assign(R, 0.0);
  s.nominal_scale.assign(R, 1.0);
  return s;
}

EconomyState benchmark_state(const BenchmarkDataset& data, const ParameterSet& p) {
  const auto R = p.dims.n_regions();
  const auto N = p.dims.n_sectors();
  const auto S = p.dims.n_skills();
  EconomyState s = empty_state(p);
  s.year = p.dims.first_year();
  s.capital = data.capital_stock;
  s.tfp = data.tfp;
  s.rd = data.rd_intensity;
  s.human_capital = data.human_capital;
  s.foreign_scale = 1.0;
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t e = 0; e < S; ++e) s.labour_supply(r, e) = p.regions[r].labour_supply[e];
    for (std::size_t e = 0; e < S; ++e) s.wage(r, e) = 1.0;
    double inv = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      s.pd(r, i) = 1.0;
      s.rent(r, i) = 1.0;
      s.output(r, i) = data.output(r, i);
      inv += data.investment_demand(r, i);
    }
    s.investment[r] = inv;
  }
  s.sector_investment = benchmark_sector_investment(data, p.dynamics);
  complete_state(s, p, ClosureSpec{});
  return s;
}

}  // namespace sgem
