#include "sgem/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sgem/demand.hpp"
#include "sgem/trade.hpp"

namespace sgem::kernels {

Workspace::Workspace(const ParameterSet& p) {
  const auto R = p.dims.n_regions();
  const auto N = p.dims.n_sectors();
  const auto S = p.dims.n_skills();
  for (Array2* a : {&pd, &pa, &pm, &rent, &xd, &absorption, &domestic, &imports, &household,
                    &government, &policy, &consumer_price, &capital_demand, &goods_supply})
    *a = Array2(R, N);
  wage = Array2(R, S);
  labour_demand = Array2(R, S);
  flows = Array3(R, R, N);
  delivered = Array2(R * N, R);
  unit_flows = Array2(R * N, R);
  tech.resize(R * N);
  for (auto* v : {&pi, &inv, &wage_income, &capital_income, &transfers, &income_tax,
                  &household_savings, &consumption_budget, &production_tax, &consumption_tax,
                  &tax_revenue, &government_savings, &government_budget, &foreign_transfers,
                  &savings, &supernumerary_household, &supernumerary_government})
    v->assign(R, 0.0);
}

namespace {

void price_region(const EvalContext& ctx, Workspace& ws, std::size_t r) {
  const auto& p = ctx.params;
  const auto R = p.dims.n_regions();
  const auto N = p.dims.n_sectors();
  const auto tr = p.transport;
  for (std::size_t i = 0; i < N; ++i) {
    const auto& nest = p.trade.nest(r, i);
    const std::size_t row = r * N + i;
    double* dp = &ws.delivered(row, 0);
    double* uf = &ws.unit_flows(row, 0);
    if (nest.tradable) {
      for (std::size_t s = 0; s < R; ++s)
        dp[s] = delivered_price(ws.pd(s, i), p.trade.margin(s, r, i), ws.pd(s, tr));
      std::span<const double> dspan(dp, R);
      ws.pm(r, i) = nest.origins.unit_cost(dspan);
      nest.origins.unit_demands(dspan, ws.pm(r, i), std::span<double>(uf, R));
    } else {
      ws.pm(r, i) = 1.0;
      for (std::size_t s = 0; s < R; ++s) uf[s] = 0.0;
    }
    ws.pa(r, i) = armington_price(nest, ws.pd(r, i), ws.pm(r, i));
  }
}

void demand_region(const EvalContext& ctx, Workspace& ws, std::size_t r) {
  const auto& p = ctx.params;
  const auto& exo = ctx.exo;
  const auto& rp = p.regions[r];
  const auto R = p.dims.n_regions();
  const auto N = p.dims.n_sectors();
  const auto S = p.dims.n_skills();
  const double idx = ws.numeraire;
  const double scale = exo.nominal_scale[r];

  std::span<const double> pa_row(&ws.pa(r, 0), N);
  std::span<const double> w_row(&ws.wage(r, 0), S);

  double ptax = 0.0;
  for (std::size_t e = 0; e < S; ++e) ws.labour_demand(r, e) = 0.0;
  for (std::size_t j = 0; j < N; ++j) ws.absorption(r, j) = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    InputPrices ip{pa_row, ws.pa(r, p.electricity), ws.pa(r, p.fuel), ws.rent(r, i), w_row};
    auto& pt = ws.tech[r * N + i];
    evaluate_technology(p.tech(r, i), ip, exo.tfp(r, i), pt);
    const double y = ws.xd(r, i);
    ptax += p.production_tax_rate(r, i) * pt.unit_cost * y;
    for (std::size_t j = 0; j < N; ++j) ws.absorption(r, j) += pt.per_unit.materials[j] * y;
    ws.absorption(r, p.electricity) += pt.per_unit.electricity * y;
    ws.absorption(r, p.fuel) += pt.per_unit.fuel * y;
    for (std::size_t e = 0; e < S; ++e) ws.labour_demand(r, e) += pt.per_unit.labour[e] * y;
    ws.capital_demand(r, i) = pt.per_unit.capital * y;
  }

  double wage_inc = 0.0, cap_inc = 0.0;
  for (std::size_t e = 0; e < S; ++e) wage_inc += ws.wage(r, e) * exo.labour_supply(r, e);
  for (std::size_t i = 0; i < N; ++i)
    cap_inc += ws.rent(r, i) * p.capital_per_stock(r, i) * exo.capital(r, i);
  const double trh = rp.transfers * scale * idx;
  const auto hh = household_accounts(rp.household_rules, wage_inc, cap_inc, trh);
  ws.wage_income[r] = wage_inc;
  ws.capital_income[r] = cap_inc;
  ws.transfers[r] = trh;
  ws.income_tax[r] = hh.income_tax;
  ws.household_savings[r] = hh.savings;
  ws.consumption_budget[r] = hh.disposable() - hh.savings;

  for (std::size_t i = 0; i < N; ++i)
    ws.consumer_price(r, i) = ws.pa(r, i) * (1.0 + rp.consumption_tax_rate[i]);
  ws.supernumerary_household[r] =
      les_demand_into(rp.household, std::span<const double>(&ws.consumer_price(r, 0), N),
                      ws.consumption_budget[r], std::span<double>(&ws.household(r, 0), N));
  double ctax = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    ctax += rp.consumption_tax_rate[i] * ws.pa(r, i) * ws.household(r, i);

  GovernmentRevenue rev{ptax, ctax, hh.income_tax};
  const double levy = exo.levy[r] * idx;
  const auto gov = government_accounts(ctx.closure.government_savings, rev, trh, levy,
                                       rp.government_savings_share,
                                       rp.government_budget * scale * idx);
  ws.production_tax[r] = ptax;
  ws.consumption_tax[r] = ctax;
  ws.tax_revenue[r] = rev.total();
  ws.government_savings[r] = gov.savings;
  ws.government_budget[r] = gov.budget;
  ws.supernumerary_government[r] = les_demand_into(
      rp.government, pa_row, gov.budget, std::span<double>(&ws.government(r, 0), N));

  const double purchases = exo.demand_shock[r] * idx;
  for (std::size_t i = 0; i < N; ++i)
    ws.policy(r, i) = purchases * rp.government_shares[i] / ws.pa(r, i);

  ws.foreign_transfers[r] = rp.foreign_transfers * exo.foreign_scale * idx;
  ws.savings[r] = hh.savings + gov.savings + ws.foreign_transfers[r];
  double pinv = 0.0;
  for (std::size_t i = 0; i < N; ++i) pinv += rp.investment_shares[i] * ws.pa(r, i);
  ws.pi[r] = pinv;

  for (std::size_t j = 0; j < N; ++j) {
    ws.absorption(r, j) += ws.household(r, j) + ws.government(r, j) + ws.policy(r, j) +
                           ws.inv[r] * rp.investment_shares[j];
    const auto split = armington_split(p.trade.nest(r, j), ws.pd(r, j), ws.pm(r, j),
                                       ws.absorption(r, j));
    ws.domestic(r, j) = split.domestic;
    ws.imports(r, j) = split.imports;
    const double* uf = &ws.unit_flows(r * N + j, 0);
    for (std::size_t s = 0; s < R; ++s) ws.flows(s, r, j) = uf[s] * split.imports;
  }
}

void residual_region(const EvalContext& ctx, Workspace& ws, std::size_t r, double* f) {
  const auto& p = ctx.params;
  const auto& exo = ctx.exo;
  const auto& L = ctx.layout;
  const auto R = p.dims.n_regions();
  const auto N = p.dims.n_sectors();
  const auto S = p.dims.n_skills();
  const auto tr = p.transport;

  double margins = 0.0;
  for (std::size_t d = 0; d < R; ++d)
    for (std::size_t k = 0; k < N; ++k) margins += p.trade.margin(r, d, k) * ws.flows(r, d, k);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool hh_ok = ws.supernumerary_household[r] >= 0.0;
  const bool gov_ok = ws.supernumerary_government[r] >= 0.0;

  for (std::size_t i = 0; i < N; ++i) {
    double supply = ws.domestic(r, i);
    for (std::size_t d = 0; d < R; ++d) supply += ws.flows(r, d, i);
    if (i == tr) supply += margins;
    ws.goods_supply(r, i) = supply;
    if (f) {
      f[L.pd(r, i)] = (hh_ok && gov_ok) ? supply / ws.xd(r, i) - 1.0 : nan;
      f[L.xd(r, i)] =
          (1.0 + p.production_tax_rate(r, i)) * ws.tech[r * N + i].unit_cost / ws.pd(r, i) - 1.0;
      f[L.rent(r, i)] =
          ws.capital_demand(r, i) / (p.capital_per_stock(r, i) * exo.capital(r, i)) - 1.0;
    }
  }
  if (f) {
    for (std::size_t e = 0; e < S; ++e)
      f[L.wage(r, e)] = ws.labour_demand(r, e) / exo.labour_supply(r, e) - 1.0;
    f[L.inv(r)] = ws.savings[r] > 0.0 ? ws.pi[r] * ws.inv[r] / ws.savings[r] - 1.0 : nan;
  }
}

double numeraire_index(const EvalContext& ctx, const Workspace& ws) {
  const auto& c = ctx.closure;
  if (c.numeraire == NumeraireKind::CommodityPrice)
    return ws.pd(c.numeraire_region, c.numeraire_sector);
  const auto& w = ctx.params.regions[c.numeraire_region].cpi_weights;
  double idx = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) idx += w[i] * ws.pa(c.numeraire_region, i);
  return idx;
}

}  // namespace

void evaluate(const EvalContext& ctx, const double* x, Workspace& ws, double* f, bool parallel) {
  const auto& p = ctx.params;
  const auto& L = ctx.layout;
  const auto R = p.dims.n_regions();
  const auto N = p.dims.n_sectors();
  const auto S = p.dims.n_skills();
  const int nr = static_cast<int>(R);
  const int threads = parallel ? thread_count() : 1;

  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t i = 0; i < N; ++i) {
      ws.pd(r, i) = std::exp(x[L.pd(r, i)]);
      ws.xd(r, i) = std::exp(x[L.xd(r, i)]);
      ws.rent(r, i) = std::exp(x[L.rent(r, i)]);
    }
    for (std::size_t e = 0; e < S; ++e) ws.wage(r, e) = std::exp(x[L.wage(r, e)]);
    ws.inv[r] = std::exp(x[L.inv(r)]);
  }

  // Exceptions cannot leave a parallel region; keep the lowest region's and rethrow.
  std::vector<std::exception_ptr> errors(R);
  auto over_regions = [&](auto&& body) {
#pragma omp parallel for schedule(static) num_threads(threads) if (parallel)
    for (int r = 0; r < nr; ++r) {
      try {
        body(static_cast<std::size_t>(r));
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  };

  over_regions([&](std::size_t r) { price_region(ctx, ws, r); });
  ws.numeraire = numeraire_index(ctx, ws);
  over_regions([&](std::size_t r) { demand_region(ctx, ws, r); });
  over_regions([&](std::size_t r) { residual_region(ctx, ws, r, f); });

  if (f) f[L.dropped_row(ctx.closure.dropped)] = ws.numeraire - 1.0;
}

double dropped_residual(const EvalContext& ctx, const Workspace& ws) {
  const auto& d = ctx.closure.dropped;
  if (d.kind == DroppedCondition::Kind::SavingsInvestment)
    return ws.pi[d.region] * ws.inv[d.region] / ws.savings[d.region] - 1.0;
  return ws.goods_supply(d.region, d.sector) / ws.xd(d.region, d.sector) - 1.0;
}

double walras_sum(const EvalContext& ctx, const Workspace& ws) {
  const auto& p = ctx.params;
  const auto& exo = ctx.exo;
  const auto R = p.dims.n_regions();
  const auto N = p.dims.n_sectors();
  const auto S = p.dims.n_skills();
  double sum = 0.0, scale = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t i = 0; i < N; ++i) {
      const double c = (1.0 + p.production_tax_rate(r, i)) * ws.tech[r * N + i].unit_cost;
      sum += ws.pd(r, i) * (ws.goods_supply(r, i) - ws.xd(r, i));
      sum += (ws.pd(r, i) - c) * ws.xd(r, i);
      sum += ws.rent(r, i) *
             (ws.capital_demand(r, i) - p.capital_per_stock(r, i) * exo.capital(r, i));
    }
    for (std::size_t e = 0; e < S; ++e)
      sum += ws.wage(r, e) * (ws.labour_demand(r, e) - exo.labour_supply(r, e));
    sum += ws.savings[r] - ws.pi[r] * ws.inv[r];
    sum -= ws.foreign_transfers[r] + (exo.demand_shock[r] - exo.levy[r]) * ws.numeraire;
    scale += ws.wage_income[r] + ws.capital_income[r];
  }
  return scale > 0.0 ? sum / scale : sum;
}

int thread_count() {
  static const int n = [] {
    if (const char* env = std::getenv("SGEM_THREADS")) {
      int v = 0;
      auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), v);
      if (ec == std::errc() && v > 0) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
  }();
  return n;
}

namespace {

void column(const EvalContext& ctx, Eigen::VectorXd& xw, const Eigen::VectorXd& f0, double step,
            Eigen::Index k, Workspace& ws, Eigen::VectorXd& fw, Eigen::MatrixXd& jac) {
  const double xk = xw[k];
  const double h = step * std::max(1.0, std::abs(xk));
  xw[k] = xk + h;
  const double hh = xw[k] - xk;  // exactly representable step
  try {
    evaluate(ctx, xw.data(), ws, fw.data(), false);
    jac.col(k) = (fw - f0) / hh;
  } catch (const std::exception&) {
    jac.col(k).setConstant(std::numeric_limits<double>::quiet_NaN());
  }
  xw[k] = xk;
}

}  // namespace

void jacobian_fd_ref(const EvalContext& ctx, const Eigen::VectorXd& x, const Eigen::VectorXd& f0,
                     double step, Eigen::MatrixXd& jac) {
  const auto n = x.size();
  jac.resize(n, n);
  Workspace ws(ctx.params);
  Eigen::VectorXd xw = x, fw(n);
  for (Eigen::Index k = 0; k < n; ++k) column(ctx, xw, f0, step, k, ws, fw, jac);
}

void jacobian_fd_omp(const EvalContext& ctx, const Eigen::VectorXd& x, const Eigen::VectorXd& f0,
                     double step, Eigen::MatrixXd& jac) {
  const auto n = x.size();
  jac.resize(n, n);
#pragma omp parallel num_threads(thread_count())
  {
    Workspace ws(ctx.params);
    Eigen::VectorXd xw = x, fw(n);
#pragma omp for schedule(static)
    for (Eigen::Index k = 0; k < n; ++k) column(ctx, xw, f0, step, k, ws, fw, jac);
  }
}

}  // namespace sgem::kernels
