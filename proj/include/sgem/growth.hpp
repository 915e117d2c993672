#pragma once

#include <array>
#include <string>
#include <vector>

#include "sgem/array.hpp"
#include "sgem/dimensions.hpp"

namespace sgem {

/// Coefficients of the TFP growth regression
///   dlnA = b1 dlnA* + b2 gap + b3 H + b4 H gap + b5 RD + b6 RD gap,
/// with gap = ln(A / A*) <= 0.
struct GrowthCoefficients {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double b4 = 0.0;
  double b5 = 0.0;
  double b6 = 0.0;

  // Structural reading of the same numbers.
  double beta() const { return b1; }
  double delta1() const { return -b2; }
  double delta2() const { return -b6; }
  double delta3() const { return -b4; }
  double rho1() const { return b5; }
  double rho2() const { return b3; }

  std::array<double, 6> as_array() const { return {b1, b2, b3, b4, b5, b6}; }

  bool operator==(const GrowthCoefficients&) const = default;
};

/// RD' = a RD + c.
struct RnDProcess {
  double a = 0.0;
  double c = 0.0;

  bool operator==(const RnDProcess&) const = default;
};

struct GrowthParams {
  bool enabled = true;
  GrowthCoefficients pooled;
  RnDProcess pooled_rd;
  std::array<GrowthCoefficients, kSectorGroupCount> by_group{};
  std::array<RnDProcess, kSectorGroupCount> rd_by_group{};

  const GrowthCoefficients& coefficients(SectorGroup g) const {
    return by_group[static_cast<std::size_t>(g)];
  }
  const RnDProcess& rd_process(SectorGroup g) const {
    return rd_by_group[static_cast<std::size_t>(g)];
  }

  /// Published sector-group estimates; cells without a group-specific estimate carry
  /// the pooled value.
  static GrowthParams defaults();

  /// Human-readable notes for coefficient sets that break stability (b2 >= 0, |a| >= 1, b1 >= 1).
  std::vector<std::string> warnings() const;

  bool operator==(const GrowthParams&) const = default;
};

double tfp_growth(double gap, double frontier_growth, double h, double rd,
                  const GrowthCoefficients& k);

double rd_step(double rd, const RnDProcess& p);

/// c / (1 - a). Throws DomainError when |a| >= 1.
double long_run_rd(const RnDProcess& p);

/// Frontier TFP of one sector: max over regions.
double frontier_level(const Array2& tfp, std::size_t sector);

/// ln of the frontier ratio between two TFP tables.
double frontier_growth(const Array2& tfp_prev, const Array2& tfp_now, std::size_t sector);

/// ln(A / A*) per (region, sector).
Array2 tfp_gaps(const Array2& tfp);

/// One-period multiplier on the gap under a static frontier: 1 + b2 + b4 H + b6 RD.
double gap_contraction_factor(const GrowthCoefficients& k, double h, double rd);

struct GrowthState {
  Array2 tfp;
  Array2 rd;               // private R&D intensity, follows the AR(1)
  std::vector<double> h;   // human-capital share per region
};

/// Additive policy impulses for one year. `rd` raises the intensity that enters the
/// growth equation in that year; `h` raises the human-capital stock permanently.
struct GrowthShocks {
  Array2 rd;
  std::vector<double> h;
};

/// Advances TFP, private R&D and human capital by one year from t-dated values.
/// The frontier is solved jointly with the leaders' own growth so that every
/// region uses the same contemporaneous frontier growth.
GrowthState apply_growth(const GrowthState& now, const GrowthShocks* shocks,
                         const Dimensions& dims, const GrowthParams& params);

}  // namespace sgem
