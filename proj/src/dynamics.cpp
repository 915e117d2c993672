#include "sgem/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sgem/error.hpp"

namespace sgem {

double capital_update(double capital, double depreciation, double investment) {
  return capital * (1.0 - depreciation) + investment;
}

double capital_remuneration(double rent, double investment_price, double growth,
                            double depreciation, WkrForm form) {
  const double real = rent / investment_price;
  if (form == WkrForm::Product) return real * (growth + depreciation);
  return real / (growth + depreciation);
}

namespace {

// Allocates `pool` over the listed cells.
void allocate_pool(double pool, const std::vector<std::pair<std::size_t, std::size_t>>& cells,
                   const Array2& b, const Array2& k, const Array2& wkr, double theta,
                   Array2& out) {
  double top = -std::numeric_limits<double>::infinity();
  for (auto [r, i] : cells)
    if (b(r, i) * k(r, i) > 0.0) top = std::max(top, theta * wkr(r, i));
  double denom = 0.0;
  for (auto [r, i] : cells)
    if (b(r, i) * k(r, i) > 0.0) denom += b(r, i) * k(r, i) * std::exp(theta * wkr(r, i) - top);
  if (!(denom > 0.0)) {
    if (pool > 0.0) throw DomainError("investment pool has no cell with positive B K");
    for (auto [r, i] : cells) out(r, i) = 0.0;
    return;
  }
  for (auto [r, i] : cells) {
    const double w = b(r, i) * k(r, i);
    out(r, i) = w > 0.0 ? pool * w * std::exp(theta * wkr(r, i) - top) / denom : 0.0;
  }
}

}  // namespace

Array2 allocate_investment(const std::vector<double>& pools, const Array2& attractor,
                           const Array2& capital, const Array2& wkr, double theta,
                           AllocationScope scope) {
  const auto R = capital.rows();
  const auto N = capital.cols();
  if (pools.size() != R || attractor.rows() != R || attractor.cols() != N || wkr.rows() != R ||
      wkr.cols() != N)
    throw StructuralError("allocate_investment: mismatched table sizes");
  Array2 out(R, N);
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  if (scope == AllocationScope::Regional) {
    for (std::size_t r = 0; r < R; ++r) {
      cells.clear();
      for (std::size_t i = 0; i < N; ++i) cells.emplace_back(r, i);
      allocate_pool(pools[r], cells, attractor, capital, wkr, theta, out);
    }
  } else {
    double world = 0.0;
    for (double s : pools) world += s;
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t i = 0; i < N; ++i) cells.emplace_back(r, i);
    allocate_pool(world, cells, attractor, capital, wkr, theta, out);
  }
  return out;
}

Array2 remuneration_rates(const EconomyState& s, const ParameterSet& p) {
  const auto R = p.dims.n_regions();
  const auto N = p.dims.n_sectors();
  const auto& dyn = p.dynamics;
  Array2 wkr(R, N);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t i = 0; i < N; ++i)
      wkr(r, i) = capital_remuneration(s.rent(r, i) * p.capital_per_stock(r, i), s.pi[r],
                                       dyn.growth_rate[r], dyn.depreciation[i], dyn.wkr_form);
  return wkr;
}

EconomyState step_period(const EconomyState& solved, const ParameterSet& p,
                         const GrowthShocks* shocks) {
  const auto R = p.dims.n_regions();
  const auto N = p.dims.n_sectors();
  const auto S = p.dims.n_skills();
  const auto& dyn = p.dynamics;

  EconomyState next = solved;
  next.year = solved.year + 1;

  const auto wkr = remuneration_rates(solved, p);
  next.sector_investment = allocate_investment(solved.savings, p.investment_attractor,
                                               solved.capital, wkr, dyn.adjustment_speed,
                                               dyn.scope);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t i = 0; i < N; ++i)
      next.capital(r, i) = capital_update(solved.capital(r, i), dyn.depreciation[i],
                                          next.sector_investment(r, i) / solved.pi[r]);

  if (p.growth.enabled) {
    GrowthState now{solved.tfp, solved.rd, solved.human_capital};
    auto g = apply_growth(now, shocks, p.dims, p.growth);
    next.tfp = std::move(g.tfp);
    next.rd = std::move(g.rd);
    next.human_capital = std::move(g.h);
  }
  next.rd_shock = Array2(R, N);

  double world_gdp = 0.0, weighted = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    const double g = dyn.growth_rate[r];
    next.nominal_scale[r] = solved.nominal_scale[r] * (1.0 + g);
    for (std::size_t e = 0; e < S; ++e) next.labour_supply(r, e) = solved.labour_supply(r, e) * (1.0 + g);
    for (std::size_t i = 0; i < N; ++i) next.output(r, i) = solved.output(r, i) * (1.0 + g);
    next.investment[r] = solved.investment[r] * (1.0 + g);
    world_gdp += p.regions[r].benchmark_gdp;
    weighted += p.regions[r].benchmark_gdp * g;
  }
  next.foreign_scale = solved.foreign_scale * (1.0 + (world_gdp > 0.0 ? weighted / world_gdp : 0.0));
  return next;
}

}  // namespace sgem
