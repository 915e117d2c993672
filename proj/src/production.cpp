#include "sgem/production.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "sgem/error.hpp"

namespace sgem {

namespace {

void require_positive(double p, const char* what) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw DomainError(fmt::format("{} price {} must be positive", what, p));
}

void check_prices(const NestedTechnology& tech, const InputPrices& p, double tfp) {
  if (p.commodities.size() != tech.materials.size())
    throw DomainError("commodity price vector does not match the materials bundle");
  if (p.wages.size() != tech.labour.size())
    throw DomainError("wage vector does not match the labour nest");
  for (double x : p.commodities) require_positive(x, "commodity");
  for (double x : p.wages) require_positive(x, "wage");
  require_positive(p.electricity, "electricity");
  require_positive(p.fuel, "fuel");
  require_positive(p.capital, "capital");
  if (!(tfp > 0.0)) throw DomainError(fmt::format("TFP level {} must be positive", tfp));
}

}  // namespace

void evaluate_technology(const NestedTechnology& tech, const InputPrices& p, double tfp,
                         TechnologyPoint& out) {
  check_prices(tech, p, tfp);
  const std::size_t n = tech.materials.size();

  double p_m = 0.0;
  for (std::size_t j = 0; j < n; ++j) p_m += tech.materials[j] * p.commodities[j];

  const std::array<double, 2> pe_in{p.fuel, p.electricity};
  const double p_e = tech.energy.unit_cost(pe_in);
  const double p_l = tech.labour.unit_cost(p.wages);
  const std::array<double, 2> pkl_in{p.capital, p_l};
  const double p_kl = tech.kl.unit_cost(pkl_in);
  const std::array<double, 2> pkle_in{p_e, p_kl};
  const double p_kle = tech.kle.unit_cost(pkle_in);
  const std::array<double, 2> top_in{p_m, p_kle};
  const double c_top = tech.top.unit_cost(top_in);

  // Hicks-neutral TFP: one unit of output needs tfp_ref/tfp units of the input composite.
  const double scale = tech.tfp_ref / tfp;
  out.unit_cost = c_top * scale;

  std::array<double, 2> q_top{}, q_kle{}, q_kl{}, q_e{};
  tech.top.unit_demands(top_in, c_top, q_top);
  tech.kle.unit_demands(pkle_in, p_kle, q_kle);
  tech.kl.unit_demands(pkl_in, p_kl, q_kl);
  tech.energy.unit_demands(pe_in, p_e, q_e);

  const double m = q_top[0] * scale;
  const double kle = q_top[1] * scale;
  const double e = q_kle[0] * kle;
  const double kl = q_kle[1] * kle;

  auto& d = out.per_unit;
  d.materials.resize(n);
  for (std::size_t j = 0; j < n; ++j) d.materials[j] = tech.materials[j] * m;
  d.fuel = q_e[0] * e;
  d.electricity = q_e[1] * e;
  d.capital = q_kl[0] * kl;
  d.labour.resize(tech.labour.size());
  tech.labour.unit_demands(p.wages, p_l, d.labour);
  for (double& x : d.labour) x *= q_kl[1] * kl;
}

double unit_cost(const NestedTechnology& tech, const InputPrices& prices, double tfp) {
  TechnologyPoint pt;
  evaluate_technology(tech, prices, tfp, pt);
  return pt.unit_cost;
}

InputDemands input_demands(const NestedTechnology& tech, const InputPrices& prices, double tfp,
                           double output) {
  if (!(output >= 0.0)) throw DomainError(fmt::format("output {} must be nonnegative", output));
  TechnologyPoint pt;
  evaluate_technology(tech, prices, tfp, pt);
  auto d = std::move(pt.per_unit);
  for (double& x : d.materials) x *= output;
  for (double& x : d.labour) x *= output;
  d.electricity *= output;
  d.fuel *= output;
  d.capital *= output;
  return d;
}

double input_cost(const InputDemands& d, const InputPrices& p) {
  double c = p.electricity * d.electricity + p.fuel * d.fuel + p.capital * d.capital;
  for (std::size_t j = 0; j < d.materials.size(); ++j) c += p.commodities[j] * d.materials[j];
  for (std::size_t e = 0; e < d.labour.size(); ++e) c += p.wages[e] * d.labour[e];
  return c;
}

}  // namespace sgem
