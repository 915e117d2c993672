#include "sgem/trade.hpp"

#include <array>

#include <fmt/format.h>

#include "sgem/error.hpp"

namespace sgem {

void TradeStructure::check_invariants() const {
  if (sigma.size() != n_sectors || sigma_lower.size() != n_sectors)
    throw CalibrationError("Armington elasticities do not cover every sector");
  for (std::size_t i = 0; i < n_sectors; ++i) {
    if (!(sigma[i] > 0.0))
      throw CalibrationError(fmt::format("Armington elasticity of sector {} must be positive", i));
    if (sigma_lower[i] != 2.0 * sigma[i])
      throw CalibrationError(
          fmt::format("sector {}: lower Armington elasticity {} is not twice {}", i,
                      sigma_lower[i], sigma[i]));
  }
  for (double m : margin.data())
    if (m < 0.0) throw CalibrationError("negative transport margin coefficient");
}

double import_price(const ArmingtonNest& nest, std::span<const double> delivered) {
  if (!nest.tradable) return 1.0;
  return nest.origins.unit_cost(delivered);
}

double armington_price(const ArmingtonNest& nest, double p_domestic, double p_import) {
  const std::array<double, 2> p{p_domestic, p_import};
  return nest.top.unit_cost(p);
}

ArmingtonSplit armington_split(const ArmingtonNest& nest, double p_domestic, double p_import,
                               double absorption) {
  if (!nest.tradable) {
    // Composite equals domestic output up to the benchmark unit convention.
    const std::array<double, 2> p{p_domestic, 1.0};
    std::array<double, 2> q{};
    nest.top.unit_demands(p, nest.top.unit_cost(p), q);
    return {q[0] * absorption, 0.0};
  }
  const std::array<double, 2> p{p_domestic, p_import};
  std::array<double, 2> q{};
  nest.top.unit_demands(p, nest.top.unit_cost(p), q);
  return {q[0] * absorption, q[1] * absorption};
}

std::vector<double> bilateral_allocation(const ArmingtonNest& nest,
                                         std::span<const double> delivered, double imports) {
  std::vector<double> flows(delivered.size(), 0.0);
  if (imports == 0.0) return flows;
  bool any = false;
  for (double t : nest.origins.theta) any = any || t > 0.0;
  if (!nest.tradable || !any)
    throw StructuralError("positive imports with no active origin region");
  nest.origins.unit_demands(delivered, nest.origins.unit_cost(delivered), flows);
  for (double& f : flows) f *= imports;
  return flows;
}

std::vector<double> margin_demand(const TradeStructure& ts, const Array3& flows) {
  std::vector<double> out(ts.n_regions, 0.0);
  for (std::size_t s = 0; s < ts.n_regions; ++s)
    for (std::size_t r = 0; r < ts.n_regions; ++r)
      for (std::size_t i = 0; i < ts.n_sectors; ++i) out[s] += ts.margin(s, r, i) * flows(s, r, i);
  return out;
}

}  // namespace sgem
