#include "sgem/parameters.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "sgem/error.hpp"

namespace sgem {

NestElasticities CalibrationConfig::elasticities_for(const std::string& sector) const {
  auto it = nest_overrides.find(sector);
  return it == nest_overrides.end() ? nests : it->second;
}

double CalibrationConfig::armington_for(const std::string& sector) const {
  auto it = armington_overrides.find(sector);
  return it == armington_overrides.end() ? armington : it->second;
}

double CalibrationConfig::frisch_for(const std::string& region) const {
  auto it = frisch_by_region.find(region);
  return it == frisch_by_region.end() ? frisch : it->second;
}

void CalibrationConfig::check() const {
  auto nests_ok = [](const NestElasticities& e, const std::string& where) {
    for (double s : {e.top, e.kle, e.kl, e.energy, e.labour})
      if (!(s > 0.0) || !std::isfinite(s))
        throw CalibrationError(fmt::format("{}: elasticity {} must be positive", where, s));
  };
  nests_ok(nests, "default nests");
  for (const auto& [k, e] : nest_overrides) nests_ok(e, k);
  if (!(armington > 0.0)) throw CalibrationError("Armington elasticity must be positive");
  for (const auto& [k, s] : armington_overrides)
    if (!(s > 0.0)) throw CalibrationError(fmt::format("{}: Armington elasticity must be positive", k));
  auto frisch_ok = [](double f, const std::string& where) {
    if (!(f < -1.0)) throw CalibrationError(fmt::format("{}: Frisch parameter {} must be below -1", where, f));
  };
  frisch_ok(frisch, "households");
  frisch_ok(government_frisch, "government");
  for (const auto& [k, f] : frisch_by_region) frisch_ok(f, k);
  for (const auto& [k, e] : income_elasticities)
    if (!(e > 0.0)) throw CalibrationError(fmt::format("{}: income elasticity must be positive", k));
  if (!(subsistence_cap > 0.0 && subsistence_cap < 1.0))
    throw CalibrationError("subsistence cap must lie in (0,1)");
}

void ParameterSet::check_invariants() const {
  trade.check_invariants();
  for (double d : dynamics.depreciation)
    if (!(d >= 0.0 && d <= 1.0))
      throw CalibrationError(fmt::format("depreciation rate {} outside [0,1]", d));
  if (!(dynamics.adjustment_speed >= 0.0))
    throw CalibrationError("investment adjustment speed must be nonnegative");
  for (std::size_t r = 0; r < regions.size(); ++r) {
    for (const auto* les : {&regions[r].household, &regions[r].government}) {
      const double s = std::accumulate(les->gamma.begin(), les->gamma.end(), 0.0);
      if (std::abs(s - 1.0) > 1e-12)
        throw CalibrationError(
            fmt::format("region {}: marginal budget shares sum to {}", dims.regions()[r], s));
    }
  }
}

}  // namespace sgem
