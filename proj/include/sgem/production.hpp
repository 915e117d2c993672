#pragma once

#include <span>
#include <vector>

#include "sgem/ces.hpp"

namespace sgem {

/// KLEM tree of one (region, sector):
///   top    : materials bundle M | KLE
///   kle    : energy E | KL
///   kl     : capital K | labour L
///   energy : non-electric | electric
///   labour : skills
/// The materials bundle is a fixed-coefficient basket of Armington commodities.
struct NestedTechnology {
  CesNest top;
  CesNest kle;
  CesNest kl;
  CesNest energy;
  CesNest labour;
  std::vector<double> materials;  // commodity quantity per unit of bundle; sums to 1
  double tfp_ref = 1.0;           // TFP level the nests were calibrated at

  bool operator==(const NestedTechnology&) const = default;
};

/// Input prices faced by one sector. Energy carriers are priced at the Armington
/// prices of the electricity and fuel commodities.
struct InputPrices {
  std::span<const double> commodities;  // Armington price per commodity
  double electricity = 1.0;
  double fuel = 1.0;
  double capital = 1.0;
  std::span<const double> wages;  // per skill
};

struct InputDemands {
  std::vector<double> materials;  // per commodity
  double electricity = 0.0;
  double fuel = 0.0;
  double capital = 0.0;
  std::vector<double> labour;  // per skill
};

/// Unit cost and per-unit-output input demands, evaluated in one bottom-up pass.
struct TechnologyPoint {
  double unit_cost = 0.0;
  InputDemands per_unit;
};

/// Cost of one unit of output at TFP level `tfp`. Throws DomainError on nonpositive prices.
double unit_cost(const NestedTechnology& tech, const InputPrices& prices, double tfp);

/// Cost-minimising input quantities for `output` units.
InputDemands input_demands(const NestedTechnology& tech, const InputPrices& prices, double tfp,
                           double output);

/// Allocation-free variant used by the equilibrium kernels.
void evaluate_technology(const NestedTechnology& tech, const InputPrices& prices, double tfp,
                         TechnologyPoint& out);

/// Payments to all inputs, sum_j p_j x_j.
double input_cost(const InputDemands& d, const InputPrices& prices);

}  // namespace sgem
