#pragma once

#include <string>
#include <vector>

#include "sgem/array.hpp"
#include "sgem/dimensions.hpp"

namespace sgem {

/// Sectors whose commodities play a special role: the two energy carriers of the
/// energy nest and the commodity that supplies transport margins.
struct DesignatedSectors {
  std::string electricity;
  std::string fuel;
  std::string transport;

  bool operator==(const DesignatedSectors&) const = default;
};

/// Benchmark-year accounting snapshot. Every entry is a value at unit prices, so
/// benchmark quantities equal values.
struct BenchmarkDataset {
  Dimensions dims;
  DesignatedSectors roles;

  // [region, sector]
  Array2 output;
  Array2 energy_elec;
  Array2 energy_nelec;
  Array2 capital_rent;
  Array2 tax_production;
  Array2 household_consumption;  // basic prices
  Array2 government_consumption;
  Array2 investment_demand;
  Array2 tax_consumption;  // paid by households on good i

  Array3 intermediate;  // [region, commodity, purchasing sector]
  Array3 wages;         // [region, sector, skill]

  // [region]
  std::vector<double> tax_income;
  std::vector<double> household_wage_income;
  std::vector<double> household_capital_income;
  std::vector<double> household_transfers;  // paid by government to households
  std::vector<double> household_savings;
  std::vector<double> government_savings;
  std::vector<double> foreign_transfers;  // net transfers from abroad into the savings pool

  Array3 trade;   // [origin, destination, sector], valued at origin prices
  Array3 margin;  // [origin, destination, sector], transport margin paid on the flow

  Array2 capital_stock;  // K0
  Array2 tfp;            // A0
  Array2 rd_intensity;   // RD0
  std::vector<double> human_capital;  // H0

  /// Zero-filled dataset with every table sized to `dims`.
  static BenchmarkDataset zeros(Dimensions dims, DesignatedSectors roles);

  std::size_t electricity_index() const { return dims.sector_index(roles.electricity); }
  std::size_t fuel_index() const { return dims.sector_index(roles.fuel); }
  std::size_t transport_index() const { return dims.sector_index(roles.transport); }

  bool operator==(const BenchmarkDataset&) const = default;
};

enum class IdentityKind {
  RevenueCost,
  CommodityBalance,
  WageIncome,
  CapitalIncome,
  HouseholdBudget,
  GovernmentBudget,
  SavingsInvestment,
  TradeBalance,
  WorldTransfers,
};

std::string to_string(IdentityKind k);

struct IdentityCheck {
  IdentityKind kind;
  std::string region;  // empty for world-level identities
  std::string sector;  // empty for region-level identities
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_residual = 0.0;
};

struct ValidationReport {
  static constexpr double kFlagThreshold = 1e-8;

  std::vector<IdentityCheck> checks;

  double max_residual() const;
  std::vector<IdentityCheck> flagged(double threshold = kFlagThreshold) const;
  bool ok(double threshold = kFlagThreshold) const { return flagged(threshold).empty(); }
};

/// Checks the benchmark accounting identities. Throws StructuralError on
/// mis-sized tables, non-finite values, negative quantities, or self-trade.
ValidationReport validate_benchmark(const BenchmarkDataset& data);

/// Relative residual used by all identity checks: |a-b| / max(|a|,|b|), 0 when both vanish.
double relative_gap(double a, double b);

/// Benchmark domestic sales of region r's output to its own market.
double benchmark_domestic_use(const BenchmarkDataset& data, std::size_t r, std::size_t i);

/// Benchmark GDP at basic prices: factor payments plus production taxes.
double benchmark_gdp(const BenchmarkDataset& data, std::size_t r);

/// Benchmark value added (factor payments) of sector i in region r.
double benchmark_value_added(const BenchmarkDataset& data, std::size_t r, std::size_t i);

}  // namespace sgem
