#include "sgem/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "sgem/error.hpp"

namespace sgem {

LesCalibration calibrate_les(std::span<const double> q, std::span<const double> p, double frisch,
                             std::span<const double> eta, double cap) {
  const std::size_t n = q.size();
  if (p.size() != n || eta.size() != n) throw DomainError("LES calibration vectors differ in size");
  double income = 0.0;
  for (std::size_t j = 0; j < n; ++j) income += p[j] * q[j];
  if (!(income > 0.0)) throw CalibrationError("LES calibration with zero expenditure");

  LesCalibration out;
  auto& mu = out.params.mu;
  auto& gamma = out.params.gamma;
  mu.assign(n, 0.0);
  gamma.assign(n, 0.0);

  // Marginal shares from income elasticities: gamma_j = eta_j w_j, normalised.
  double gsum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    gamma[j] = eta[j] * p[j] * q[j] / income;
    gsum += gamma[j];
  }
  for (double& g : gamma) g /= gsum;

  if (std::isinf(frisch)) return out;  // mu = 0, gamma = budget shares (eta = 1)

  for (std::size_t j = 0; j < n; ++j) {
    if (q[j] == 0.0) continue;
    const double requested = q[j] + gamma[j] * income / (p[j] * frisch);
    const double clamped = std::clamp(requested, 0.0, cap * q[j]);
    if (clamped != requested) out.clamped.emplace_back(j, requested);
    mu[j] = clamped;
  }
  // Re-derive gamma so that the benchmark is an exact LES point.
  double committed = 0.0;
  for (std::size_t j = 0; j < n; ++j) committed += p[j] * mu[j];
  const double super = income - committed;
  for (std::size_t j = 0; j < n; ++j) gamma[j] = p[j] * (q[j] - mu[j]) / super;
  return out;
}

namespace {

std::string cell(const BenchmarkDataset& d, std::size_t r, std::size_t i) {
  return fmt::format("{}/{}", d.dims.regions()[r], d.dims.sectors()[i]);
}

CesNest inactive_nest(std::size_t n) {
  CesNest c;
  c.theta.assign(n, 0.0);
  c.ref_price.assign(n, 1.0);
  return c;
}

}  // namespace

std::vector<NestedTechnology> calibrate_ces_nests(const BenchmarkDataset& d,
                                                  const CalibrationConfig& cfg) {
  const auto R = d.dims.n_regions();
  const auto N = d.dims.n_sectors();
  const auto S = d.dims.n_skills();
  std::vector<NestedTechnology> out(R * N);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t i = 0; i < N; ++i) {
      const auto el = cfg.elasticities_for(d.dims.sectors()[i]);
      const double y = d.output(r, i);
      if (!(y > 0.0))
        throw CalibrationError(fmt::format("sector {} has no benchmark output", cell(d, r, i)));

      std::vector<double> mat(N);
      for (std::size_t j = 0; j < N; ++j) mat[j] = d.intermediate(r, j, i);
      const double m = std::accumulate(mat.begin(), mat.end(), 0.0);
      std::vector<double> lab(S);
      for (std::size_t e = 0; e < S; ++e) lab[e] = d.wages(r, i, e);
      const double l = std::accumulate(lab.begin(), lab.end(), 0.0);
      const double k = d.capital_rent(r, i);
      const double e_val = d.energy_elec(r, i) + d.energy_nelec(r, i);

      auto need = [&](double v, const char* nest) {
        if (!(v > 0.0))
          throw CalibrationError(
              fmt::format("nest {} of {} has zero benchmark value under a positive parent", nest,
                          cell(d, r, i)));
      };
      need(m, "M");
      need(e_val, "E");
      need(k, "K");
      need(l, "L");

      auto& t = out[r * N + i];
      t.tfp_ref = d.tfp(r, i);
      t.materials.resize(N);
      for (std::size_t j = 0; j < N; ++j) t.materials[j] = mat[j] / m;
      t.labour = CesNest::calibrate(lab, el.labour);
      const std::array<double, 2> kl{k, l};
      t.kl = CesNest::calibrate(kl, el.kl);
      const std::array<double, 2> en{d.energy_nelec(r, i), d.energy_elec(r, i)};
      t.energy = CesNest::calibrate(en, el.energy);
      const std::array<double, 2> kle{e_val, k + l};
      t.kle = CesNest::calibrate(kle, el.kle);
      // Output is valued at the tax-inclusive price, so the top composite costs 1/(1+tp).
      const std::array<double, 2> top{m, e_val + k + l};
      const std::array<double, 2> ones{1.0, 1.0};
      t.top = CesNest::calibrate(top, ones, el.top, y);
    }
  }
  return out;
}

TradeStructure calibrate_armington(const BenchmarkDataset& d, const CalibrationConfig& cfg) {
  const auto R = d.dims.n_regions();
  const auto N = d.dims.n_sectors();
  TradeStructure ts;
  ts.n_regions = R;
  ts.n_sectors = N;
  ts.transport_sector = d.transport_index();
  ts.margin = Array3(R, R, N);
  for (std::size_t i = 0; i < N; ++i) {
    const double s = cfg.armington_for(d.dims.sectors()[i]);
    ts.sigma.push_back(s);
    ts.sigma_lower.push_back(2.0 * s);
  }
  ts.nests.resize(R * N);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t i = 0; i < N; ++i) {
      std::vector<double> delivered(R, 0.0), p0(R, 1.0);
      double imports = 0.0;
      for (std::size_t s = 0; s < R; ++s) {
        const double flow = d.trade(s, r, i);
        const double mv = d.margin(s, r, i);
        if (flow == 0.0 && mv > 0.0)
          throw StructuralError(fmt::format("margin without a trade flow {}->{} in sector {}",
                                            d.dims.regions()[s], d.dims.regions()[r],
                                            d.dims.sectors()[i]));
        if (flow > 0.0) {
          ts.margin(s, r, i) = mv / flow;
          p0[s] = 1.0 + ts.margin(s, r, i);
          delivered[s] = flow + mv;
          imports += flow + mv;
        }
      }
      const double dom = std::max(0.0, benchmark_domestic_use(d, r, i));
      auto& nest = ts.nests[r * N + i];
      nest.tradable = imports > 0.0;
      const std::array<double, 2> top{dom, imports};
      const std::array<double, 2> ones{1.0, 1.0};
      if (dom + imports > 0.0) {
        nest.top = CesNest::calibrate(top, ones, ts.sigma[i], dom + imports);
      } else {
        // Commodity unused in this region; keep a purely domestic composite.
        const std::array<double, 2> unit{1.0, 0.0};
        nest.top = CesNest::calibrate(unit, ts.sigma[i]);
      }
      if (nest.tradable)
        nest.origins = CesNest::calibrate(delivered, p0, ts.sigma_lower[i], imports);
      else
        nest.origins = inactive_nest(R);
      nest.origins.sigma = ts.sigma_lower[i];
    }
  }
  ts.check_invariants();
  return ts;
}

Array2 invert_investment_allocation(const Array2& inv, const Array2& cap, const Array2& wkr,
                                    double theta) {
  Array2 b(inv.rows(), inv.cols());
  double sum = 0.0;
  std::size_t active = 0;
  for (std::size_t r = 0; r < inv.rows(); ++r) {
    for (std::size_t i = 0; i < inv.cols(); ++i) {
      if (inv(r, i) > 0.0 && !(cap(r, i) > 0.0))
        throw CalibrationError(
            fmt::format("cell ({},{}) receives investment but has no capital", r, i));
      if (cap(r, i) > 0.0) {
        b(r, i) = inv(r, i) / (cap(r, i) * std::exp(theta * wkr(r, i)));
        sum += b(r, i);
        ++active;
      }
    }
  }
  if (sum > 0.0)
    for (double& x : b.data()) x *= static_cast<double>(active) / sum;
  return b;
}

Array2 benchmark_sector_investment(const BenchmarkDataset& d, const DynamicsSettings& dyn) {
  const auto R = d.dims.n_regions();
  const auto N = d.dims.n_sectors();
  Array2 inv(R, N);
  for (std::size_t r = 0; r < R; ++r) {
    double pool = 0.0, repl = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      pool += d.investment_demand(r, i);
      repl += dyn.depreciation[i] * d.capital_stock(r, i);
    }
    double k_total = 0.0;
    for (std::size_t i = 0; i < N; ++i) k_total += d.capital_stock(r, i);
    // Without depreciation anywhere the pool follows the capital stock itself.
    for (std::size_t i = 0; i < N; ++i) {
      if (repl > 0.0)
        inv(r, i) = pool * dyn.depreciation[i] * d.capital_stock(r, i) / repl;
      else if (k_total > 0.0)
        inv(r, i) = pool * d.capital_stock(r, i) / k_total;
    }
  }
  return inv;
}

Array2 calibrate_investment_attractors(const BenchmarkDataset& d, const DynamicsSettings& dyn) {
  const auto R = d.dims.n_regions();
  const auto N = d.dims.n_sectors();
  Array2 wkr(R, N);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t i = 0; i < N; ++i) {
      const double k = d.capital_stock(r, i);
      const double rate = k > 0.0 ? d.capital_rent(r, i) / k : 0.0;
      wkr(r, i) = capital_remuneration(rate, 1.0, dyn.growth_rate[r], dyn.depreciation[i],
                                       dyn.wkr_form);
    }
  return invert_investment_allocation(benchmark_sector_investment(d, dyn), d.capital_stock, wkr,
                                      dyn.adjustment_speed);
}

double CalibrationResult::max_residual() const {
  double m = 0.0;
  for (const auto& row : report) m = std::max(m, row.residual);
  return m;
}

namespace {

void report_nest(std::vector<CalibrationRow>& rep, const std::string& nest,
                 const std::string& region, const std::string& sector, const CesNest& c,
                 const std::vector<std::string>& names, double residual) {
  const auto std_form = c.standard_form();
  rep.push_back({nest, region, sector, "sigma", c.sigma, residual});
  for (std::size_t j = 0; j < c.size(); ++j)
    rep.push_back({nest, region, sector, "share:" + names[j], std_form.shares[j], residual});
  rep.push_back({nest, region, sector, "scale", std_form.scale, residual});
}

double rel(double a, double b) { return relative_gap(a, b); }

}  // namespace

CalibrationResult calibrate(const BenchmarkDataset& d, const DynamicsSettings& dyn,
                            const GrowthParams& growth, const CalibrationConfig& cfg) {
  cfg.check();
  const auto R = d.dims.n_regions();
  const auto N = d.dims.n_sectors();
  const auto S = d.dims.n_skills();
  if (dyn.depreciation.size() != N || dyn.growth_rate.size() != R)
    throw StructuralError("dynamics settings do not match the model dimensions");

  CalibrationResult res;
  auto& P = res.params;
  P.dims = d.dims;
  P.roles = d.roles;
  P.config_used = cfg;
  P.electricity = d.electricity_index();
  P.fuel = d.fuel_index();
  P.transport = d.transport_index();
  P.technology = calibrate_ces_nests(d, cfg);
  P.trade = calibrate_armington(d, cfg);
  P.dynamics = dyn;
  P.growth = growth;
  P.investment_attractor = calibrate_investment_attractors(d, dyn);
  P.production_tax_rate = Array2(R, N);
  P.capital_per_stock = Array2(R, N);
  P.benchmark_output = d.output;

  std::vector<std::string> skill_names = d.dims.skills();
  std::vector<std::string> sector_names = d.dims.sectors();

  for (std::size_t r = 0; r < R; ++r) {
    const auto& rn = d.dims.regions()[r];
    for (std::size_t i = 0; i < N; ++i) {
      const auto& sn = d.dims.sectors()[i];
      const double y = d.output(r, i);
      P.production_tax_rate(r, i) = d.tax_production(r, i) / (y - d.tax_production(r, i));
      if (!(d.capital_stock(r, i) > 0.0))
        throw CalibrationError(fmt::format("sector {}/{} has no capital stock", rn, sn));
      P.capital_per_stock(r, i) = d.capital_rent(r, i) / d.capital_stock(r, i);

      // Dual route: demands at unit prices against the benchmark table.
      const auto& t = P.technology[r * N + i];
      std::vector<double> pc(N, 1.0), pw(S, 1.0);
      InputPrices ip{pc, 1.0, 1.0, 1.0, pw};
      const auto dem = input_demands(t, ip, d.tfp(r, i), y);
      double resid = rel((1.0 + P.production_tax_rate(r, i)) * unit_cost(t, ip, d.tfp(r, i)), 1.0);
      for (std::size_t j = 0; j < N; ++j)
        resid = std::max(resid, rel(dem.materials[j], d.intermediate(r, j, i)));
      for (std::size_t e = 0; e < S; ++e)
        resid = std::max(resid, rel(dem.labour[e], d.wages(r, i, e)));
      resid = std::max({resid, rel(dem.capital, d.capital_rent(r, i)),
                        rel(dem.electricity, d.energy_elec(r, i)),
                        rel(dem.fuel, d.energy_nelec(r, i))});

      // Primal route: the standard-form aggregators must map benchmark inputs to output.
      const auto l_q = t.labour.standard_form().output(std::vector<double>(
          d.wages.data().begin() + static_cast<std::ptrdiff_t>((r * N + i) * S),
          d.wages.data().begin() + static_cast<std::ptrdiff_t>((r * N + i + 1) * S)));
      const std::array<double, 2> kl_in{d.capital_rent(r, i), l_q};
      const double kl_q = t.kl.standard_form().output(kl_in);
      const std::array<double, 2> e_in{d.energy_nelec(r, i), d.energy_elec(r, i)};
      const double e_q = t.energy.standard_form().output(e_in);
      const std::array<double, 2> kle_in{e_q, kl_q};
      const double kle_q = t.kle.standard_form().output(kle_in);
      double m_val = 0.0;
      for (std::size_t j = 0; j < N; ++j) m_val += d.intermediate(r, j, i);
      const std::array<double, 2> top_in{m_val, kle_q};
      const double y_primal = t.top.standard_form().output(top_in);
      resid = std::max(resid, rel(y_primal, y));

      report_nest(res.report, "top", rn, sn, t.top, {"M", "KLE"}, resid);
      report_nest(res.report, "kle", rn, sn, t.kle, {"E", "KL"}, resid);
      report_nest(res.report, "kl", rn, sn, t.kl, {"K", "L"}, resid);
      report_nest(res.report, "energy", rn, sn, t.energy, {"NELEC", "ELEC"}, resid);
      report_nest(res.report, "labour", rn, sn, t.labour, skill_names, resid);
      res.report.push_back({"top", rn, sn, "production_tax_rate", P.production_tax_rate(r, i), resid});

      const auto& an = P.trade.nest(r, i);
      double arm_resid = 0.0;
      {
        const double dom = std::max(0.0, benchmark_domestic_use(d, r, i));
        double imports = 0.0;
        for (std::size_t s = 0; s < R; ++s) imports += d.trade(s, r, i) + d.margin(s, r, i);
        const auto split = armington_split(an, 1.0, 1.0, dom + imports);
        arm_resid = std::max(rel(split.domestic, dom), rel(split.imports, imports));
        if (an.tradable) {
          std::vector<double> deliv(R);
          for (std::size_t s = 0; s < R; ++s)
            deliv[s] = delivered_price(1.0, P.trade.margin(s, r, i), 1.0);
          const auto flows = bilateral_allocation(an, deliv, imports);
          for (std::size_t s = 0; s < R; ++s)
            arm_resid = std::max(arm_resid, rel(flows[s], d.trade(s, r, i)));
        }
      }
      report_nest(res.report, "armington", rn, sn, an.top, {"domestic", "imports"}, arm_resid);
      if (an.tradable)
        report_nest(res.report, "armington_origins", rn, sn, an.origins, d.dims.regions(),
                    arm_resid);
    }

    // Final demand and income rules.
    RegionParams rp;
    std::vector<double> cq(N), cp(N), gq(N), ones(N, 1.0), eta(N, 1.0);
    double c_total = 0.0, g_total = 0.0, inv_total = 0.0, tp_total = 0.0, tc_total = 0.0;
    rp.consumption_tax_rate.assign(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      const auto& sn = d.dims.sectors()[i];
      cq[i] = d.household_consumption(r, i);
      rp.consumption_tax_rate[i] = cq[i] > 0.0 ? d.tax_consumption(r, i) / cq[i] : 0.0;
      cp[i] = 1.0 + rp.consumption_tax_rate[i];
      gq[i] = d.government_consumption(r, i);
      auto it = cfg.income_elasticities.find(sn);
      if (it != cfg.income_elasticities.end()) eta[i] = it->second;
      c_total += cq[i];
      g_total += gq[i];
      inv_total += d.investment_demand(r, i);
      tp_total += d.tax_production(r, i);
      tc_total += d.tax_consumption(r, i);
    }
    if (!(c_total > 0.0)) throw CalibrationError(fmt::format("region {} has no household consumption", rn));
    if (!(g_total > 0.0)) throw CalibrationError(fmt::format("region {} has no government consumption", rn));
    if (!(inv_total > 0.0)) throw CalibrationError(fmt::format("region {} has no investment", rn));

    auto hh = calibrate_les(cq, cp, cfg.frisch_for(rn), eta, cfg.subsistence_cap);
    auto gv = calibrate_les(gq, ones, cfg.government_frisch, ones, cfg.subsistence_cap);
    for (auto [j, req] : hh.clamped)
      res.warnings.push_back({"household", rn, d.dims.sectors()[j], req, hh.params.mu[j]});
    for (auto [j, req] : gv.clamped)
      res.warnings.push_back({"government", rn, d.dims.sectors()[j], req, gv.params.mu[j]});
    rp.household = std::move(hh.params);
    rp.government = std::move(gv.params);

    double les_resid = 0.0;
    {
      double inc = 0.0;
      for (std::size_t i = 0; i < N; ++i) inc += cp[i] * cq[i];
      const auto c = les_demand(rp.household, cp, inc);
      const auto g = les_demand(rp.government, ones, g_total);
      for (std::size_t i = 0; i < N; ++i)
        les_resid = std::max({les_resid, rel(c[i], cq[i]), rel(g[i], gq[i])});
    }
    for (std::size_t i = 0; i < N; ++i) {
      const auto& sn = d.dims.sectors()[i];
      res.report.push_back({"les_household", rn, sn, "mu", rp.household.mu[i], les_resid});
      res.report.push_back({"les_household", rn, sn, "gamma", rp.household.gamma[i], les_resid});
      res.report.push_back({"les_government", rn, sn, "mu", rp.government.mu[i], les_resid});
      res.report.push_back({"les_government", rn, sn, "gamma", rp.government.gamma[i], les_resid});
    }

    const double gross = d.household_wage_income[r] + d.household_capital_income[r] +
                         d.household_transfers[r];
    rp.household_rules.income_tax_rate = gross > 0.0 ? d.tax_income[r] / gross : 0.0;
    const double disp = gross - d.tax_income[r];
    rp.household_rules.savings_rate = disp > 0.0 ? d.household_savings[r] / disp : 0.0;
    const double revenue = tp_total + tc_total + d.tax_income[r];
    rp.government_savings_share = revenue != 0.0 ? d.government_savings[r] / revenue : 0.0;
    rp.transfers = d.household_transfers[r];
    rp.foreign_transfers = d.foreign_transfers[r];
    rp.government_budget = g_total;
    rp.investment_shares.resize(N);
    rp.cpi_weights.resize(N);
    rp.government_shares.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
      rp.investment_shares[i] = d.investment_demand(r, i) / inv_total;
      rp.cpi_weights[i] = cq[i] / c_total;
      rp.government_shares[i] = gq[i] / g_total;
    }
    rp.labour_supply.assign(S, 0.0);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t e = 0; e < S; ++e) rp.labour_supply[e] += d.wages(r, i, e);
    for (std::size_t e = 0; e < S; ++e)
      if (!(rp.labour_supply[e] > 0.0))
        throw CalibrationError(
            fmt::format("region {} employs no {} labour", rn, d.dims.skills()[e]));
    rp.benchmark_savings = inv_total;
    rp.benchmark_gdp = benchmark_gdp(d, r);

    res.report.push_back({"income", rn, "", "income_tax_rate", rp.household_rules.income_tax_rate, 0.0});
    res.report.push_back({"income", rn, "", "savings_rate", rp.household_rules.savings_rate, 0.0});
    res.report.push_back({"income", rn, "", "government_savings_share", rp.government_savings_share, 0.0});
    P.regions.push_back(std::move(rp));

    for (std::size_t i = 0; i < N; ++i)
      res.report.push_back({"investment", rn, d.dims.sectors()[i], "attractor",
                            P.investment_attractor(r, i), 0.0});
  }
  P.check_invariants();
  return res;
}

}  // namespace sgem
