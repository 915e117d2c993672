#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgem/benchmark.hpp"
#include "sgem/dynamics.hpp"
#include "sgem/parameters.hpp"

namespace sgem {

/// A subsistence level that had to be clamped into [0, cap * C].
struct LesWarning {
  std::string agent;
  std::string region;
  std::string sector;
  double requested = 0.0;
  double clamped = 0.0;
};

struct LesCalibration {
  LesParams params;
  std::vector<std::pair<std::size_t, double>> clamped;  // good, requested mu
};

/// Frisch-parameter calibration of one LES agent. `quantities` are benchmark
/// consumption at `prices`; `income` is total spending. A Frisch value of -inf gives
/// mu = 0. Minima are clamped into [0, cap * C] and gamma re-derived so the
/// benchmark is reproduced exactly.
LesCalibration calibrate_les(std::span<const double> quantities, std::span<const double> prices,
                             double frisch, std::span<const double> income_elasticities,
                             double cap);

/// KLEM trees for every (region, sector), calibrated at unit prices and benchmark TFP.
std::vector<NestedTechnology> calibrate_ces_nests(const BenchmarkDataset& data,
                                                  const CalibrationConfig& cfg);

/// Two-level Armington nests and margin coefficients.
TradeStructure calibrate_armington(const BenchmarkDataset& data, const CalibrationConfig& cfg);

/// B proportional to I0 / (K0 exp(theta WKR0)); normalised to mean one over active cells.
/// Throws CalibrationError for positive investment into a sector without capital.
Array2 invert_investment_allocation(const Array2& investment, const Array2& capital,
                                    const Array2& wkr, double theta);

/// Benchmark investment by destination sector: each region's savings pool split in
/// proportion to replacement investment delta_i K0.
Array2 benchmark_sector_investment(const BenchmarkDataset& data, const DynamicsSettings& dyn);

Array2 calibrate_investment_attractors(const BenchmarkDataset& data, const DynamicsSettings& dyn);

struct CalibrationRow {
  std::string nest;
  std::string region;
  std::string sector;
  std::string parameter;
  double value = 0.0;
  double residual = 0.0;
};

struct CalibrationResult {
  ParameterSet params;
  std::vector<CalibrationRow> report;
  std::vector<LesWarning> warnings;

  double max_residual() const;
};

/// Full calibration. The benchmark must pass validate_benchmark.
CalibrationResult calibrate(const BenchmarkDataset& data, const DynamicsSettings& dyn,
                            const GrowthParams& growth, const CalibrationConfig& cfg);

}  // namespace sgem
