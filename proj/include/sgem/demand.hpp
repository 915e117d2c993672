#pragma once

#include <span>
#include <vector>

namespace sgem {

/// Stone-Geary minima and marginal budget shares of one agent.
struct LesParams {
  std::vector<double> mu;
  std::vector<double> gamma;

  bool operator==(const LesParams&) const = default;
};

/// C_i = mu_i + gamma_i (I - sum_j mu_j P_j) / P_i.
/// Throws DomainError when supernumerary income is negative.
std::vector<double> les_demand(const LesParams& les, std::span<const double> prices,
                               double income);

/// Unchecked variant for the solver kernels. Returns supernumerary income.
double les_demand_into(const LesParams& les, std::span<const double> prices, double income,
                       std::span<double> out);

/// Household income and its uses for one region.
struct HouseholdAccounts {
  double wages = 0.0;
  double capital_income = 0.0;
  double transfers = 0.0;
  double income_tax = 0.0;
  double savings = 0.0;

  double gross() const { return wages + capital_income + transfers; }
  double disposable() const { return gross() - income_tax; }
};

/// Income left for consumption: wages + capital + transfers - income tax - savings.
double household_disposable_income(const HouseholdAccounts& a);

struct HouseholdRules {
  double income_tax_rate = 0.0;  // on gross income
  double savings_rate = 0.0;     // on disposable income

  bool operator==(const HouseholdRules&) const = default;
};

/// Applies the tax and savings rules to gross income components.
HouseholdAccounts household_accounts(const HouseholdRules& rules, double wages,
                                     double capital_income, double transfers);

enum class GovSavingsMode { Exogenous, Endogenous };

struct GovernmentRevenue {
  double production = 0.0;
  double consumption = 0.0;
  double income = 0.0;

  double total() const { return production + consumption + income; }
};

struct GovernmentAccounts {
  GovernmentRevenue revenue;
  double transfers = 0.0;
  double levy = 0.0;  // paid out of the budget to finance policy spending elsewhere
  double savings = 0.0;
  double budget = 0.0;  // spent on government consumption
};

/// Exogenous mode: savings = savings_share * revenue, budget is the residual.
/// Endogenous mode: budget = fixed_budget, savings is the residual.
GovernmentAccounts government_accounts(GovSavingsMode mode, const GovernmentRevenue& revenue,
                                       double transfers, double levy, double savings_share,
                                       double fixed_budget);

}  // namespace sgem
