#pragma once

#include <span>
#include <vector>

namespace sgem {

/// Substitution exponent rho = (sigma - 1) / sigma of a CES aggregator.
double substitution_exponent(double sigma);

/// Share/scale view Y = phi * [sum_j alpha_j x_j^rho]^(1/rho) of a calibrated nest,
/// with the alphas normalised to sum to one. For sigma = 1 this is the
/// Cobb-Douglas Y = phi * prod x_j^alpha_j; for sigma = 0 it is the Leontief
/// Y = phi * min_j x_j / alpha_j.
struct CesStandardForm {
  double sigma = 1.0;
  std::vector<double> shares;
  double scale = 1.0;

  /// Primal output for the given input quantities.
  double output(std::span<const double> inputs) const;
};

/// One CES nest in calibrated-share form:
///   c(p) = c0 * [sum_j theta_j (p_j / p0_j)^(1-sigma)]^(1/(1-sigma))
/// where theta are benchmark value shares, p0 benchmark input prices and c0 the
/// benchmark unit cost of the composite. Inputs with theta = 0 are inactive.
struct CesNest {
  double sigma = 1.0;
  std::vector<double> theta;
  std::vector<double> ref_price;
  double ref_cost = 1.0;

  /// Calibrates from benchmark input values, input prices and composite quantity.
  static CesNest calibrate(std::span<const double> values, std::span<const double> prices,
                           double sigma, double composite_quantity);
  /// Calibration at unit input prices with composite quantity equal to total value.
  static CesNest calibrate(std::span<const double> values, double sigma);

  std::size_t size() const { return theta.size(); }

  double unit_cost(std::span<const double> prices) const;

  /// Input quantities per unit of composite, given prices and the unit cost they imply.
  void unit_demands(std::span<const double> prices, double cost, std::span<double> out) const;

  /// Equivalent share/scale parameters for a composite unit with benchmark quantity 1.
  CesStandardForm standard_form() const;

  bool operator==(const CesNest&) const = default;
};

}  // namespace sgem
