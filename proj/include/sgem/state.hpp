#pragma once

#include <vector>

#include "sgem/array.hpp"
#include "sgem/benchmark.hpp"
#include "sgem/parameters.hpp"

namespace sgem {

/// One period of the economy. The first block is exogenous to the period solve;
/// everything after it is filled in by solve_period.
struct EconomyState {
  int year = 0;

  // Exogenous in the period.
  Array2 capital;                      // K [r,i]
  Array2 tfp;                          // A [r,i]
  Array2 rd;                           // private R&D intensity [r,i]
  Array2 rd_shock;                     // policy R&D intensity entering growth this year
  std::vector<double> human_capital;   // H [r]
  Array2 labour_supply;                // [r, skill]
  std::vector<double> nominal_scale;   // growth factor on domestic nominal items [r]
  double foreign_scale = 1.0;          // common growth factor on foreign transfers
  std::vector<double> demand_shock;    // policy purchases of the government basket [r]
  std::vector<double> levy;            // contributions financing those purchases [r]

  // Prices.
  Array2 pd;    // domestic supply price [r,i]
  Array2 pa;    // Armington composite price [r,i]
  Array2 pm;    // import composite price [r,i]
  Array2 wage;  // [r, skill]
  Array2 rent;  // capital service price [r,i]
  std::vector<double> pi;  // investment price [r]
  double numeraire = 1.0;

  // Quantities.
  Array2 output;      // X^D
  Array2 absorption;  // Armington composite X
  Array2 domestic;    // domestic part of X
  Array2 imports;     // import composite X^M
  Array3 flows;       // X^T [origin, destination, i]
  Array2 household;   // C
  Array2 government;  // G, including policy purchases
  std::vector<double> investment;  // real investment composite [r]
  Array2 sector_investment;        // nominal allocation to each sector's capital [r,i]

  // Incomes.
  std::vector<double> household_income;  // gross
  std::vector<double> income_tax;
  std::vector<double> household_savings;
  std::vector<double> consumption_budget;
  std::vector<double> tax_revenue;
  std::vector<double> government_savings;
  std::vector<double> government_budget;
  std::vector<double> savings;  // pool S_r

  std::vector<double> gdp;       // nominal, factor payments plus production taxes
  std::vector<double> gdp_real;  // value added at benchmark prices

  bool operator==(const EconomyState&) const = default;
};

/// Benchmark-year state: unit prices, benchmark quantities, initial stocks.
EconomyState benchmark_state(const BenchmarkDataset& data, const ParameterSet& params);

/// Sized, zero-filled state for the dimensions of `params`.
EconomyState empty_state(const ParameterSet& params);

}  // namespace sgem
