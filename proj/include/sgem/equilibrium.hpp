#pragma once

#include <string>
#include <vector>

#include "sgem/error.hpp"
#include "sgem/parameters.hpp"
#include "sgem/state.hpp"

namespace sgem {

enum class NumeraireKind { RegionCpi, CommodityPrice };

/// The market condition left out of the system (Walras). Its row carries the numeraire.
struct DroppedCondition {
  enum class Kind { SavingsInvestment, Goods } kind = Kind::SavingsInvestment;
  std::size_t region = 0;
  std::size_t sector = 0;

  bool operator==(const DroppedCondition&) const = default;
};

struct ClosureSpec {
  NumeraireKind numeraire = NumeraireKind::RegionCpi;
  std::size_t numeraire_region = 0;
  std::size_t numeraire_sector = 0;  // only for CommodityPrice
  GovSavingsMode government_savings = GovSavingsMode::Exogenous;
  bool foreign_transfers_fixed = true;
  DroppedCondition dropped;

  /// Throws StructuralError for unsupported or out-of-range choices.
  void check(const ParameterSet& params) const;

  bool operator==(const ClosureSpec&) const = default;
};

struct SolverConfig {
  int max_iterations = 50;
  double tolerance = 1e-10;
  double damping = 1.0;
  double fd_step = 1e-7;
  double shrink = 0.5;
  double price_floor = 1e-10;
  int max_backtracks = 40;
  bool parallel = true;

  void check() const;

  bool operator==(const SolverConfig&) const = default;
};

/// Layout of the unknown vector (all in logs). Per region, in order:
///   PD[N] | XD[N] | wage[S] | rent[N] | INV
/// The residual vector uses the same layout:
///   goods[N] | zero profit[N] | labour[S] | capital[N] | savings-investment
/// except that the dropped condition's row holds the numeraire equation.
struct SystemLayout {
  std::size_t n_regions = 0;
  std::size_t n_sectors = 0;
  std::size_t n_skills = 0;

  explicit SystemLayout(const ParameterSet& p)
      : n_regions(p.dims.n_regions()), n_sectors(p.dims.n_sectors()), n_skills(p.dims.n_skills()) {}

  std::size_t block() const { return 3 * n_sectors + n_skills + 1; }
  std::size_t size() const { return n_regions * block(); }
  std::size_t pd(std::size_t r, std::size_t i) const { return r * block() + i; }
  std::size_t xd(std::size_t r, std::size_t i) const { return r * block() + n_sectors + i; }
  std::size_t wage(std::size_t r, std::size_t e) const { return r * block() + 2 * n_sectors + e; }
  std::size_t rent(std::size_t r, std::size_t i) const {
    return r * block() + 2 * n_sectors + n_skills + i;
  }
  std::size_t inv(std::size_t r) const { return r * block() + 3 * n_sectors + n_skills; }

  std::size_t dropped_row(const DroppedCondition& d) const {
    return d.kind == DroppedCondition::Kind::SavingsInvestment ? inv(d.region)
                                                               : pd(d.region, d.sector);
  }
  std::string describe_row(const ParameterSet& p, std::size_t row) const;
};

/// Log unknowns taken from the endogenous fields of a state.
std::vector<double> pack_unknowns(const EconomyState& s, const ParameterSet& p);

/// Residuals in the layout above, one per independent condition. Rows are relative
/// (dimensionless). Throws NumericalError naming the block on a non-finite value.
std::vector<double> excess_demands(const EconomyState& s, const ParameterSet& p,
                                   const ClosureSpec& c);

/// Residual of the dropped condition, never imposed by the solver.
double walras_residual(const EconomyState& s, const ParameterSet& p, const ClosureSpec& c);

/// Value-weighted sum over every condition, including the dropped one, minus net
/// transfers from outside the modelled world, relative to world GDP. Zero for any
/// state by accounting.
double walras_sum(const EconomyState& s, const ParameterSet& p, const ClosureSpec& c);

/// Recomputes every derived field of `s` (prices, quantities, incomes, GDP) from its
/// PD, XD, wage, rent and investment fields.
void complete_state(EconomyState& s, const ParameterSet& p, const ClosureSpec& c);

/// Per-region trade balance residual: delivered imports - exports - margins supplied
/// - (foreign transfers + policy purchases - levy), relative to gross trade.
std::vector<double> trade_balance_residuals(const EconomyState& s, const ParameterSet& p,
                                            const ClosureSpec& c);

struct TraceRow {
  int iteration = 0;
  double max_residual = 0.0;
  double step = 0.0;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double max_residual = 0.0;
  double walras = 0.0;
  std::vector<TraceRow> trace;
  std::string message;
};

struct SolveResult {
  EconomyState state;
  SolveReport report;
};

/// Thrown by solve_period; carries the best iterate and residual history.
class SolveFailure : public NumericalError {
 public:
  SolveFailure(const std::string& what, EconomyState best, SolveReport report)
      : NumericalError(what), best_(std::move(best)), report_(std::move(report)) {}
  const EconomyState& best() const { return best_; }
  const SolveReport& report() const { return report_; }

 private:
  EconomyState best_;
  SolveReport report_;
};

/// Damped Newton on the log unknowns with a forward-difference Jacobian and
/// backtracking on the max-norm of the residual.
SolveResult solve_period(const EconomyState& guess, const ParameterSet& p, const ClosureSpec& c,
                         const SolverConfig& cfg);

}  // namespace sgem
