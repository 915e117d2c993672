#pragma once

#include <vector>

#include "sgem/array.hpp"
#include "sgem/growth.hpp"
#include "sgem/parameters.hpp"
#include "sgem/state.hpp"

namespace sgem {

/// K' = K (1 - delta) + I, with I in units of the capital good.
double capital_update(double capital, double depreciation, double investment);

/// Capital remuneration rate WKR from the rental per unit of stock and the
/// investment price. Product form (r/PI)(g+delta) by default; the ratio form
/// (r/PI)/(g+delta) is the alternative reading.
double capital_remuneration(double rent, double investment_price, double growth,
                            double depreciation, WkrForm form = WkrForm::Product);

/// Logit allocation of savings pools across capital cells:
///   I_ri = S B_ri K_ri exp(theta WKR_ri) / sum over the pool.
/// Regional scope uses one pool per region; pooled scope allocates the sum of all
/// pools across every (region, sector). Returns nominal investment by cell.
/// Throws DomainError when a positive pool faces an all-zero denominator.
Array2 allocate_investment(const std::vector<double>& pools, const Array2& attractor,
                           const Array2& capital, const Array2& wkr, double theta,
                           AllocationScope scope = AllocationScope::Regional);

/// WKR per (region, sector) at a solved state.
Array2 remuneration_rates(const EconomyState& s, const ParameterSet& p);

/// Builds the next period's starting point from a solved state: allocates the
/// savings pools, accumulates capital, advances TFP, R&D and human capital,
/// grows labour supply and nominal scales by g, and keeps the solved prices as the
/// warm start. `shocks` may be null.
EconomyState step_period(const EconomyState& solved, const ParameterSet& p,
                         const GrowthShocks* shocks);

}  // namespace sgem
