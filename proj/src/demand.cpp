#include "sgem/demand.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sgem/error.hpp"

namespace sgem {

double les_demand_into(const LesParams& les, std::span<const double> prices, double income,
                       std::span<double> out) {
  const std::size_t n = les.mu.size();
  double committed = 0.0;
  for (std::size_t j = 0; j < n; ++j) committed += les.mu[j] * prices[j];
  const double super = income - committed;
  for (std::size_t j = 0; j < n; ++j) out[j] = les.mu[j] + les.gamma[j] * super / prices[j];
  return super;
}

std::vector<double> les_demand(const LesParams& les, std::span<const double> prices,
                               double income) {
  if (prices.size() != les.mu.size() || les.gamma.size() != les.mu.size())
    throw DomainError("LES price vector does not match the parameter vectors");
  for (double p : prices)
    if (!(p > 0.0)) throw DomainError(fmt::format("LES price {} must be positive", p));
  std::vector<double> c(les.mu.size());
  const double super = les_demand_into(les, prices, income, c);
  // Relative tolerance so that exact benchmark replication with rounding is not rejected.
  if (super < -1e-12 * std::max(1.0, std::abs(income)))
    throw DomainError(
        fmt::format("income {} does not cover the committed expenditure {}", income,
                    income - super));
  return c;
}

double household_disposable_income(const HouseholdAccounts& a) {
  const double y = a.wages + a.capital_income + a.transfers - a.income_tax - a.savings;
  if (!std::isfinite(y)) throw DomainError("non-finite household income");
  return y;
}

HouseholdAccounts household_accounts(const HouseholdRules& rules, double wages,
                                     double capital_income, double transfers) {
  HouseholdAccounts a;
  a.wages = wages;
  a.capital_income = capital_income;
  a.transfers = transfers;
  a.income_tax = rules.income_tax_rate * a.gross();
  a.savings = rules.savings_rate * a.disposable();
  return a;
}

GovernmentAccounts government_accounts(GovSavingsMode mode, const GovernmentRevenue& revenue,
                                       double transfers, double levy, double savings_share,
                                       double fixed_budget) {
  GovernmentAccounts g;
  g.revenue = revenue;
  g.transfers = transfers;
  g.levy = levy;
  const double rev = revenue.total();
  if (mode == GovSavingsMode::Exogenous) {
    g.savings = savings_share * rev;
    g.budget = rev - transfers - levy - g.savings;
  } else {
    g.budget = fixed_budget;
    g.savings = rev - transfers - levy - g.budget;
  }
  return g;
}

}  // namespace sgem
