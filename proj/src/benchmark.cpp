#include "sgem/benchmark.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sgem/error.hpp"

namespace sgem {

BenchmarkDataset BenchmarkDataset::zeros(Dimensions dims, DesignatedSectors roles) {
  const auto R = dims.n_regions();
  const auto N = dims.n_sectors();
  const auto S = dims.n_skills();
  BenchmarkDataset d;
  d.dims = std::move(dims);
  d.roles = std::move(roles);
  for (Array2* a : {&d.output, &d.energy_elec, &d.energy_nelec, &d.capital_rent, &d.tax_production,
                    &d.household_consumption, &d.government_consumption, &d.investment_demand,
                    &d.tax_consumption, &d.capital_stock, &d.tfp, &d.rd_intensity})
    *a = Array2(R, N);
  d.intermediate = Array3(R, N, N);
  d.wages = Array3(R, N, S);
  for (auto* v : {&d.tax_income, &d.household_wage_income, &d.household_capital_income,
                  &d.household_transfers, &d.household_savings, &d.government_savings,
                  &d.foreign_transfers, &d.human_capital})
    v->assign(R, 0.0);
  d.trade = Array3(R, R, N);
  d.margin = Array3(R, R, N);
  return d;
}

std::string to_string(IdentityKind k) {
  switch (k) {
    case IdentityKind::RevenueCost: return "revenue_cost";
    case IdentityKind::CommodityBalance: return "commodity_balance";
    case IdentityKind::WageIncome: return "wage_income";
    case IdentityKind::CapitalIncome: return "capital_income";
    case IdentityKind::HouseholdBudget: return "household_budget";
    case IdentityKind::GovernmentBudget: return "government_budget";
    case IdentityKind::SavingsInvestment: return "savings_investment";
    case IdentityKind::TradeBalance: return "trade_balance";
    case IdentityKind::WorldTransfers: return "world_transfers";
  }
  return "?";
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

double ValidationReport::max_residual() const {
  double m = 0.0;
  for (const auto& c : checks) m = std::max(m, c.relative_residual);
  return m;
}

std::vector<IdentityCheck> ValidationReport::flagged(double threshold) const {
  std::vector<IdentityCheck> out;
  for (const auto& c : checks)
    if (!(c.relative_residual <= threshold)) out.push_back(c);
  return out;
}

namespace {

void check_shape(bool ok, const char* table) {
  if (!ok) throw StructuralError(fmt::format("table '{}' does not match the model dimensions", table));
}

void check_cell(double v, bool nonneg, const char* table, const std::string& region,
                const std::string& sector) {
  if (!std::isfinite(v))
    throw StructuralError(fmt::format("non-finite value in {}[{},{}]", table, region, sector));
  if (nonneg && v < 0.0)
    throw StructuralError(
        fmt::format("negative value {} in {}[{},{}]", v, table, region, sector));
}

double exports_of(const BenchmarkDataset& d, std::size_t r, std::size_t i) {
  double x = 0.0;
  for (std::size_t s = 0; s < d.dims.n_regions(); ++s) x += d.trade(r, s, i);
  return x;
}

double margins_supplied(const BenchmarkDataset& d, std::size_t r) {
  double x = 0.0;
  for (std::size_t s = 0; s < d.dims.n_regions(); ++s)
    for (std::size_t k = 0; k < d.dims.n_sectors(); ++k) x += d.margin(r, s, k);
  return x;
}

double imports_of(const BenchmarkDataset& d, std::size_t r, std::size_t i) {
  double x = 0.0;
  for (std::size_t s = 0; s < d.dims.n_regions(); ++s) x += d.trade(s, r, i) + d.margin(s, r, i);
  return x;
}

}  // namespace

double benchmark_domestic_use(const BenchmarkDataset& d, std::size_t r, std::size_t i) {
  double v = d.output(r, i) - exports_of(d, r, i);
  if (i == d.transport_index()) v -= margins_supplied(d, r);
  return v;
}

double benchmark_value_added(const BenchmarkDataset& d, std::size_t r, std::size_t i) {
  double va = d.capital_rent(r, i);
  for (std::size_t e = 0; e < d.dims.n_skills(); ++e) va += d.wages(r, i, e);
  return va;
}

double benchmark_gdp(const BenchmarkDataset& d, std::size_t r) {
  double g = 0.0;
  for (std::size_t i = 0; i < d.dims.n_sectors(); ++i)
    g += benchmark_value_added(d, r, i) + d.tax_production(r, i);
  return g;
}

ValidationReport validate_benchmark(const BenchmarkDataset& d) {
  const auto& dims = d.dims;
  const auto R = dims.n_regions();
  const auto N = dims.n_sectors();
  const auto S = dims.n_skills();

  for (const auto* a : {&d.output, &d.energy_elec, &d.energy_nelec, &d.capital_rent,
                        &d.tax_production, &d.household_consumption, &d.government_consumption,
                        &d.investment_demand, &d.tax_consumption, &d.capital_stock, &d.tfp,
                        &d.rd_intensity})
    check_shape(a->rows() == R && a->cols() == N, "region x sector");
  check_shape(d.intermediate.dim0() == R && d.intermediate.dim1() == N && d.intermediate.dim2() == N,
              "intermediate");
  check_shape(d.wages.dim0() == R && d.wages.dim1() == N && d.wages.dim2() == S, "wages");
  check_shape(d.trade.dim0() == R && d.trade.dim1() == R && d.trade.dim2() == N, "trade");
  check_shape(d.margin.dim0() == R && d.margin.dim1() == R && d.margin.dim2() == N, "margin");
  for (const auto* v : {&d.tax_income, &d.household_wage_income, &d.household_capital_income,
                        &d.household_transfers, &d.household_savings, &d.government_savings,
                        &d.foreign_transfers, &d.human_capital})
    check_shape(v->size() == R, "region vector");
  (void)d.electricity_index();
  (void)d.fuel_index();
  (void)d.transport_index();

  for (std::size_t r = 0; r < R; ++r) {
    const auto& rn = dims.regions()[r];
    for (std::size_t i = 0; i < N; ++i) {
      const auto& sn = dims.sectors()[i];
      check_cell(d.output(r, i), true, "output", rn, sn);
      check_cell(d.energy_elec(r, i), true, "energy_elec", rn, sn);
      check_cell(d.energy_nelec(r, i), true, "energy_nelec", rn, sn);
      check_cell(d.capital_rent(r, i), true, "capital_rent", rn, sn);
      check_cell(d.tax_production(r, i), false, "tax_production", rn, sn);
      check_cell(d.household_consumption(r, i), true, "household_consumption", rn, sn);
      check_cell(d.government_consumption(r, i), true, "government_consumption", rn, sn);
      check_cell(d.investment_demand(r, i), true, "investment_demand", rn, sn);
      check_cell(d.tax_consumption(r, i), false, "tax_consumption", rn, sn);
      check_cell(d.capital_stock(r, i), true, "capital_stock", rn, sn);
      check_cell(d.tfp(r, i), true, "tfp", rn, sn);
      if (!(d.tfp(r, i) > 0.0))
        throw StructuralError(fmt::format("tfp[{},{}] must be positive", rn, sn));
      check_cell(d.rd_intensity(r, i), true, "rd_intensity", rn, sn);
      for (std::size_t j = 0; j < N; ++j)
        check_cell(d.intermediate(r, j, i), true, "intermediate", rn,
                   dims.sectors()[j] + "->" + sn);
      for (std::size_t e = 0; e < S; ++e)
        check_cell(d.wages(r, i, e), true, "wages", rn, sn + "/" + dims.skills()[e]);
      for (std::size_t s = 0; s < R; ++s) {
        check_cell(d.trade(r, s, i), true, "trade", rn + "->" + dims.regions()[s], sn);
        check_cell(d.margin(r, s, i), true, "margin", rn + "->" + dims.regions()[s], sn);
      }
      if (d.trade(r, r, i) != 0.0 || d.margin(r, r, i) != 0.0)
        throw StructuralError(fmt::format("self-trade recorded for {} in sector {}", rn, sn));
      if (benchmark_domestic_use(d, r, i) < -1e-9 * std::max(1.0, d.output(r, i)))
        throw StructuralError(
            fmt::format("exports of {} from {} exceed its output", sn, rn));
    }
    check_cell(d.human_capital[r], true, "human_capital", rn, "");
    if (d.human_capital[r] > 1.0)
      throw StructuralError(fmt::format("human_capital[{}] exceeds 1", rn));
    for (const auto* v : {&d.tax_income, &d.household_wage_income, &d.household_capital_income,
                          &d.household_transfers, &d.household_savings, &d.government_savings,
                          &d.foreign_transfers})
      check_cell((*v)[r], false, "region account", rn, "");
  }

  ValidationReport rep;
  auto add = [&](IdentityKind k, std::size_t r, std::string sector, double lhs, double rhs) {
    rep.checks.push_back({k, dims.regions()[r], std::move(sector), lhs, rhs, relative_gap(lhs, rhs)});
  };

  const auto el = d.electricity_index();
  const auto fu = d.fuel_index();
  double world = 0.0, world_scale = 0.0;

  for (std::size_t r = 0; r < R; ++r) {
    double wage_total = 0.0, rent_total = 0.0, tp_total = 0.0, tc_total = 0.0;
    double c_total = 0.0, g_total = 0.0, inv_total = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double cost = 0.0;
      for (std::size_t j = 0; j < N; ++j) cost += d.intermediate(r, j, i);
      cost += d.energy_elec(r, i) + d.energy_nelec(r, i);
      for (std::size_t e = 0; e < S; ++e) cost += d.wages(r, i, e);
      cost += d.capital_rent(r, i) + d.tax_production(r, i);
      add(IdentityKind::RevenueCost, r, dims.sectors()[i], d.output(r, i), cost);

      double supply = benchmark_domestic_use(d, r, i) + imports_of(d, r, i);
      double absorption = 0.0;
      for (std::size_t k = 0; k < N; ++k) absorption += d.intermediate(r, i, k);
      if (i == el)
        for (std::size_t k = 0; k < N; ++k) absorption += d.energy_elec(r, k);
      if (i == fu)
        for (std::size_t k = 0; k < N; ++k) absorption += d.energy_nelec(r, k);
      absorption += d.household_consumption(r, i) + d.government_consumption(r, i) +
                    d.investment_demand(r, i);
      add(IdentityKind::CommodityBalance, r, dims.sectors()[i], supply, absorption);

      for (std::size_t e = 0; e < S; ++e) wage_total += d.wages(r, i, e);
      rent_total += d.capital_rent(r, i);
      tp_total += d.tax_production(r, i);
      tc_total += d.tax_consumption(r, i);
      c_total += d.household_consumption(r, i);
      g_total += d.government_consumption(r, i);
      inv_total += d.investment_demand(r, i);
    }
    add(IdentityKind::WageIncome, r, "", d.household_wage_income[r], wage_total);
    add(IdentityKind::CapitalIncome, r, "", d.household_capital_income[r], rent_total);
    add(IdentityKind::HouseholdBudget, r, "", c_total + tc_total,
        d.household_wage_income[r] + d.household_capital_income[r] + d.household_transfers[r] -
            d.tax_income[r] - d.household_savings[r]);
    add(IdentityKind::GovernmentBudget, r, "", g_total,
        tp_total + tc_total + d.tax_income[r] - d.household_transfers[r] -
            d.government_savings[r]);
    add(IdentityKind::SavingsInvestment, r, "", inv_total,
        d.household_savings[r] + d.government_savings[r] + d.foreign_transfers[r]);

    double imports = 0.0, exports = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      imports += imports_of(d, r, i);
      exports += exports_of(d, r, i);
    }
    // Scale the trade balance by gross trade so a balanced region does not divide by ~0.
    const double lhs = imports - exports - margins_supplied(d, r);
    const double scale = std::max({imports, exports, std::abs(d.foreign_transfers[r])});
    IdentityCheck tb{IdentityKind::TradeBalance, dims.regions()[r], "", lhs,
                     d.foreign_transfers[r],
                     scale > 0.0 ? std::abs(lhs - d.foreign_transfers[r]) / scale : 0.0};
    rep.checks.push_back(tb);

    world += d.foreign_transfers[r];
    world_scale += imports + std::abs(d.foreign_transfers[r]);
  }
  rep.checks.push_back({IdentityKind::WorldTransfers, "", "", world, 0.0,
                        world_scale > 0.0 ? std::abs(world) / world_scale : 0.0});
  return rep;
}

}  // namespace sgem
