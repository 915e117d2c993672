#pragma once

#include <span>
#include <vector>

#include "sgem/array.hpp"
#include "sgem/ces.hpp"

namespace sgem {

/// Armington nests of one (destination region, commodity).
///   top     : domestic | import composite   (sigma)
///   origins : bilateral varieties by origin  (2 sigma)
/// Lower-nest reference prices are the benchmark delivered prices 1 + m_sri.
struct ArmingtonNest {
  CesNest top;
  CesNest origins;
  bool tradable = false;

  bool operator==(const ArmingtonNest&) const = default;
};

struct TradeStructure {
  std::size_t n_regions = 0;
  std::size_t n_sectors = 0;
  std::vector<double> sigma;         // top elasticity per sector
  std::vector<double> sigma_lower;   // 2 * sigma per sector
  std::vector<ArmingtonNest> nests;  // [destination * n_sectors + sector]
  Array3 margin;                     // [origin, destination, sector], per unit of flow
  std::size_t transport_sector = 0;

  const ArmingtonNest& nest(std::size_t r, std::size_t i) const { return nests[r * n_sectors + i]; }

  /// Throws CalibrationError unless sigma_lower is exactly twice sigma for every sector.
  void check_invariants() const;

  bool operator==(const TradeStructure&) const = default;
};

struct ArmingtonSplit {
  double domestic = 0.0;
  double imports = 0.0;
};

/// Price of one unit of the import composite given delivered prices by origin.
double import_price(const ArmingtonNest& nest, std::span<const double> delivered);

/// Price of one unit of the Armington composite.
double armington_price(const ArmingtonNest& nest, double p_domestic, double p_import);

/// Cost-minimising domestic and import-composite quantities for `absorption` units.
/// Non-tradables return everything domestic whatever the import price.
ArmingtonSplit armington_split(const ArmingtonNest& nest, double p_domestic, double p_import,
                               double absorption);

/// Bilateral flows X^T by origin for an import composite of `imports` units.
/// Throws StructuralError when imports are positive but no origin is active.
std::vector<double> bilateral_allocation(const ArmingtonNest& nest,
                                         std::span<const double> delivered, double imports);

/// Delivered price of a flow: origin supply price plus margin times origin transport price.
inline double delivered_price(double p_origin, double margin, double p_transport_origin) {
  return p_origin + margin * p_transport_origin;
}

/// Transport services demanded from each origin region, sum over destinations and
/// commodities of m_sri * X^T_sri. `flows` is laid out like TradeStructure::margin.
std::vector<double> margin_demand(const TradeStructure& ts, const Array3& flows);

}  // namespace sgem
