#include "sgem/toy.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "sgem/error.hpp"

namespace sgem {

double ToyRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  spare_ = rad * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return rad * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

const std::vector<std::string> kSectorCodes = {"C26", "D35", "H49", "M72", "C19",
                                               "A01", "C10-C12", "K64", "C24", "G46"};

Dimensions toy_dimensions(const ToySpec& spec) {
  std::vector<std::string> regions, sectors;
  std::map<std::string, SectorGroup> groups;
  for (std::size_t r = 0; r < spec.regions; ++r) regions.push_back(fmt::format("R{:02}", r + 1));
  const auto& nace = default_nace_groups();
  for (std::size_t i = 0; i < spec.sectors; ++i) {
    const std::string code = i < kSectorCodes.size() ? kSectorCodes[i] : fmt::format("X{:02}", i + 1);
    sectors.push_back(code);
    const auto it = nace.find(code);
    groups[code] = it != nace.end() ? it->second : SectorGroup::OtherServices;
  }
  return Dimensions(regions, sectors, {"low", "medium", "high"}, groups, spec.first_year,
                    spec.last_year);
}

}  // namespace

ToyModel make_toy(const ToySpec& spec) {
  if (spec.regions < 2 || spec.sectors < 2)
    throw StructuralError("toy models need at least 2 regions and 2 sectors");
  auto dims = toy_dimensions(spec);
  const auto R = spec.regions;
  const auto N = spec.sectors;
  const auto S = dims.n_skills();
  const auto& sec = dims.sectors();
  DesignatedSectors roles;
  roles.electricity = "D35";
  roles.fuel = N > 4 ? "C19" : "D35";
  roles.transport = N > 2 ? "H49" : "D35";
  auto d = BenchmarkDataset::zeros(dims, roles);
  const auto el = d.electricity_index();
  const auto fu = d.fuel_index();
  const auto tr = d.transport_index();
  // The fourth sector (business services) is non-tradable when present.
  auto tradable = [&](std::size_t i) { return !(N > 3 && i == 3); };

  ToyRng rng(spec.seed);
  std::vector<double> size(R);
  for (std::size_t r = 0; r < R; ++r) size[r] = rng.uniform(0.6, 1.6);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t i = 0; i < N; ++i)
      d.output(r, i) = 100.0 * size[r] * rng.uniform(0.7, 1.3) * (i == tr ? 1.5 : 1.0);

  // Exports and the transport margins they carry.
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t i = 0; i < N; ++i) {
      if (!tradable(i)) continue;
      const double share = rng.uniform(0.08, 0.22);
      std::vector<double> w(R, 0.0);
      double wsum = 0.0;
      for (std::size_t s = 0; s < R; ++s)
        if (s != r) wsum += (w[s] = rng.uniform(0.5, 1.5) * size[s]);
      for (std::size_t s = 0; s < R; ++s) {
        if (s == r) continue;
        d.trade(r, s, i) = d.output(r, i) * share * w[s] / wsum;
        d.margin(r, s, i) = d.trade(r, s, i) * rng.uniform(0.02, 0.06);
      }
    }

  std::vector<double> depreciation(N);
  for (std::size_t i = 0; i < N; ++i) depreciation[i] = rng.uniform(0.04, 0.08);

  for (std::size_t r = 0; r < R; ++r) {
    // Cost side: intermediate and energy coefficients, taxes, labour; rent closes the account.
    for (std::size_t i = 0; i < N; ++i) {
      const double x = d.output(r, i);
      std::vector<double> a(N);
      double asum = 0.0;
      for (std::size_t j = 0; j < N; ++j) asum += (a[j] = rng.uniform(0.2, 1.0));
      const double total = rng.uniform(0.22, 0.32);
      for (std::size_t j = 0; j < N; ++j) d.intermediate(r, j, i) = x * total * a[j] / asum;
      d.energy_elec(r, i) = x * rng.uniform(0.02, 0.04);
      d.energy_nelec(r, i) = x * rng.uniform(0.02, 0.05);
      d.tax_production(r, i) = x * rng.uniform(0.01, 0.03);
      double used = d.energy_elec(r, i) + d.energy_nelec(r, i) + d.tax_production(r, i);
      for (std::size_t j = 0; j < N; ++j) used += d.intermediate(r, j, i);
      const double va = x - used;
      const double labour = va * rng.uniform(0.5, 0.7);
      const double skill[3] = {rng.uniform(0.2, 0.4), rng.uniform(0.35, 0.5), rng.uniform(0.15, 0.35)};
      const double ssum = skill[0] + skill[1] + skill[2];
      double paid = 0.0;
      for (std::size_t e = 0; e < S; ++e) paid += (d.wages(r, i, e) = labour * skill[e] / ssum);
      d.capital_rent(r, i) = va - paid;
    }

    // Final demand of each commodity is what remains of absorption after intermediate use.
    std::vector<double> final_demand(N);
    double fd_total = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      double exports = 0.0, imports = 0.0, margins = 0.0;
      for (std::size_t s = 0; s < R; ++s) {
        exports += d.trade(r, s, j);
        imports += d.trade(s, r, j) + d.margin(s, r, j);
      }
      if (j == tr)
        for (std::size_t s = 0; s < R; ++s)
          for (std::size_t k = 0; k < N; ++k) margins += d.margin(r, s, k);
      double use = 0.0;
      for (std::size_t k = 0; k < N; ++k) use += d.intermediate(r, j, k);
      if (j == el)
        for (std::size_t k = 0; k < N; ++k) use += d.energy_elec(r, k);
      if (j == fu)
        for (std::size_t k = 0; k < N; ++k) use += d.energy_nelec(r, k);
      final_demand[j] = d.output(r, j) - exports - margins + imports - use;
      if (!(final_demand[j] > 0.0))
        throw StructuralError(fmt::format("toy generator: no final demand left for {}", sec[j]));
      fd_total += final_demand[j];
    }
    const double gov_total = fd_total * rng.uniform(0.15, 0.2);
    const double inv_total = fd_total * rng.uniform(0.18, 0.24);
    std::vector<double> u(N), v(N);
    double usum = 0.0, vsum = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      usum += (u[j] = final_demand[j] * rng.uniform(0.8, 1.2));
      vsum += (v[j] = final_demand[j] * rng.uniform(0.8, 1.2));
    }
    const double tc = rng.uniform(0.08, 0.15);
    double c_total = 0.0, tc_total = 0.0, tp_total = 0.0, w_total = 0.0, k_total = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      d.government_consumption(r, j) = gov_total * u[j] / usum;
      d.investment_demand(r, j) = inv_total * v[j] / vsum;
      d.household_consumption(r, j) =
          final_demand[j] - d.government_consumption(r, j) - d.investment_demand(r, j);
      d.tax_consumption(r, j) = tc * d.household_consumption(r, j);
      c_total += d.household_consumption(r, j);
      tc_total += d.tax_consumption(r, j);
      tp_total += d.tax_production(r, j);
      k_total += d.capital_rent(r, j);
      for (std::size_t e = 0; e < S; ++e) w_total += d.wages(r, j, e);
    }

    // Income side; the savings-investment balance follows from the GDP identity.
    d.household_wage_income[r] = w_total;
    d.household_capital_income[r] = k_total;
    d.household_transfers[r] = 0.15 * w_total;
    d.household_savings[r] = rng.uniform(0.1, 0.14) * (w_total + k_total);
    d.tax_income[r] = w_total + k_total + d.household_transfers[r] - d.household_savings[r] -
                      c_total - tc_total;
    d.government_savings[r] = tp_total + tc_total + d.tax_income[r] - d.household_transfers[r] -
                              gov_total;
    if (!(d.tax_income[r] > 0.0))
      throw StructuralError("toy generator: negative income tax, adjust the draws");

    // Stationary capital: replacement investment equals each sector's share of the pool.
    for (std::size_t i = 0; i < N; ++i)
      d.capital_stock(r, i) = inv_total * d.capital_rent(r, i) / k_total / depreciation[i];

    for (std::size_t i = 0; i < N; ++i) {
      d.tfp(r, i) = r == 0 ? 1.0 : std::exp(-rng.uniform(0.05, 0.4));
      d.rd_intensity(r, i) = rng.uniform(0.005, 0.05);
    }
    d.human_capital[r] = rng.uniform(0.15, 0.35);
  }

  for (std::size_t r = 0; r < R; ++r) {
    double imports = 0.0, exports = 0.0, margins = 0.0;
    for (std::size_t s = 0; s < R; ++s)
      for (std::size_t i = 0; i < N; ++i) {
        imports += d.trade(s, r, i) + d.margin(s, r, i);
        exports += d.trade(r, s, i);
        margins += d.margin(r, s, i);
      }
    d.foreign_transfers[r] = imports - exports - margins;
  }

  ToyModel out;
  out.data = std::move(d);
  out.dynamics.depreciation = depreciation;
  out.dynamics.growth_rate.assign(R, spec.growth_rate);
  out.dynamics.adjustment_speed = 2.0;
  return out;
}

}  // namespace sgem
