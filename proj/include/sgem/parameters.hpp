#pragma once

#include <map>
#include <string>
#include <vector>

#include "sgem/array.hpp"
#include "sgem/benchmark.hpp"
#include "sgem/demand.hpp"
#include "sgem/dimensions.hpp"
#include "sgem/growth.hpp"
#include "sgem/production.hpp"
#include "sgem/trade.hpp"

namespace sgem {

/// Substitution elasticities of the KLEM tree of one sector.
struct NestElasticities {
  double top = 0.3;     // M | KLE
  double kle = 0.4;     // E | KL
  double kl = 0.8;      // K | L
  double energy = 1.5;  // non-electric | electric
  double labour = 1.2;  // across skills

  bool operator==(const NestElasticities&) const = default;
};

struct CalibrationConfig {
  NestElasticities nests;
  double armington = 2.0;
  std::map<std::string, NestElasticities> nest_overrides;  // by sector
  std::map<std::string, double> armington_overrides;       // by sector

  /// LES calibration. A Frisch value of -inf means no subsistence minima.
  double frisch = -2.0;
  std::map<std::string, double> frisch_by_region;
  std::map<std::string, double> income_elasticities;  // by sector, default 1
  double government_frisch = -2.0;
  double subsistence_cap = 0.9;

  NestElasticities elasticities_for(const std::string& sector) const;
  double armington_for(const std::string& sector) const;
  double frisch_for(const std::string& region) const;

  /// Throws CalibrationError on sigma <= 0, Frisch >= -1, or a cap outside (0,1).
  void check() const;

  bool operator==(const CalibrationConfig&) const = default;
};

enum class WkrForm { Product, Ratio };
enum class AllocationScope { Regional, Pooled };

/// Dynamic settings read from the model manifest.
struct DynamicsSettings {
  std::vector<double> depreciation;  // per sector
  std::vector<double> growth_rate;   // per region
  double adjustment_speed = 0.0;     // logit weight on capital remuneration
  WkrForm wkr_form = WkrForm::Product;
  AllocationScope scope = AllocationScope::Regional;

  bool operator==(const DynamicsSettings&) const = default;
};

struct RegionParams {
  LesParams household;
  LesParams government;
  HouseholdRules household_rules;
  std::vector<double> consumption_tax_rate;  // per good, on basic price
  double government_savings_share = 0.0;     // of revenue
  double transfers = 0.0;                    // government to households, benchmark nominal
  double foreign_transfers = 0.0;            // benchmark nominal
  double government_budget = 0.0;            // benchmark government consumption value
  std::vector<double> investment_shares;     // Leontief value shares of the investment good
  std::vector<double> cpi_weights;           // household basket at basic prices
  std::vector<double> government_shares;     // benchmark government basket value shares
  std::vector<double> labour_supply;         // per skill, benchmark
  double benchmark_savings = 0.0;
  double benchmark_gdp = 0.0;

  bool operator==(const RegionParams&) const = default;
};

/// Everything the period model needs besides the evolving state.
struct ParameterSet {
  Dimensions dims;
  DesignatedSectors roles;
  CalibrationConfig config_used;

  std::vector<NestedTechnology> technology;  // [r * N + i]
  Array2 production_tax_rate;                // on unit cost
  Array2 capital_per_stock;                  // capital services per unit of stock
  Array2 benchmark_output;
  TradeStructure trade;
  std::vector<RegionParams> regions;

  DynamicsSettings dynamics;
  Array2 investment_attractor;  // B
  GrowthParams growth;

  std::size_t electricity = 0;
  std::size_t fuel = 0;
  std::size_t transport = 0;

  const NestedTechnology& tech(std::size_t r, std::size_t i) const {
    return technology[r * dims.n_sectors() + i];
  }

  /// Throws CalibrationError when an invariant is broken (sigma^T = 2 sigma,
  /// depreciation in [0,1], LES shares summing to one).
  void check_invariants() const;

  bool operator==(const ParameterSet&) const = default;
};

}  // namespace sgem
