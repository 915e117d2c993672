#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sgem/equilibrium.hpp"
#include "sgem/production.hpp"

namespace sgem::kernels {

/// Scratch and results of one evaluation of the period system.
struct Workspace {
  explicit Workspace(const ParameterSet& p);

  Array2 pd, pa, pm, wage, rent;
  std::vector<double> pi;
  double numeraire = 1.0;

  Array2 xd;
  std::vector<double> inv;
  std::vector<TechnologyPoint> tech;  // [r * N + i], per unit of output

  Array2 absorption, domestic, imports;
  Array3 flows;
  Array2 household, government, policy;  // policy = purchases financed by the levy
  Array2 consumer_price;

  std::vector<double> wage_income, capital_income, transfers, income_tax, household_savings;
  std::vector<double> consumption_budget, production_tax, consumption_tax, tax_revenue;
  std::vector<double> government_savings, government_budget, foreign_transfers, savings;
  std::vector<double> supernumerary_household, supernumerary_government;

  Array2 labour_demand;   // [r, skill]
  Array2 capital_demand;  // [r, i]
  Array2 goods_supply;    // demand for region r's output: domestic + exports + margins

  // Per-region scratch for bilateral prices and unit demands.
  Array2 delivered;
  Array2 unit_flows;
};

struct EvalContext {
  const ParameterSet& params;
  const ClosureSpec& closure;
  const EconomyState& exo;
  SystemLayout layout;

  EvalContext(const ParameterSet& p, const ClosureSpec& c, const EconomyState& s)
      : params(p), closure(c), exo(s), layout(p) {}
};

/// Evaluates the full system at log unknowns `x`; writes residuals when `f` is non-null.
/// Regions are processed in parallel when `parallel` is true; results are
/// bit-identical either way.
void evaluate(const EvalContext& ctx, const double* x, Workspace& ws, double* f, bool parallel);

inline void evaluate_ref(const EvalContext& ctx, const double* x, Workspace& ws, double* f) {
  evaluate(ctx, x, ws, f, false);
}
inline void evaluate_omp(const EvalContext& ctx, const double* x, Workspace& ws, double* f) {
  evaluate(ctx, x, ws, f, true);
}

/// Residual of the dropped condition from a filled workspace (same scaling as its row).
double dropped_residual(const EvalContext& ctx, const Workspace& ws);

/// Value-weighted sum of all conditions minus outside transfers, relative to world GDP.
double walras_sum(const EvalContext& ctx, const Workspace& ws);

/// Forward-difference Jacobian, one column at a time.
void jacobian_fd_ref(const EvalContext& ctx, const Eigen::VectorXd& x, const Eigen::VectorXd& f0,
                     double step, Eigen::MatrixXd& jac);

/// Same columns computed in parallel with thread-local workspaces.
void jacobian_fd_omp(const EvalContext& ctx, const Eigen::VectorXd& x, const Eigen::VectorXd& f0,
                     double step, Eigen::MatrixXd& jac);

/// Thread count from SGEM_THREADS, else the OpenMP default.
int thread_count();

}  // namespace sgem::kernels
