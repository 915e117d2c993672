#include "sgem/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "sgem/kernels.hpp"

namespace sgem {

void ClosureSpec::check(const ParameterSet& p) const {
  const auto R = p.dims.n_regions();
  const auto N = p.dims.n_sectors();
  if (numeraire_region >= R) throw StructuralError("numeraire region out of range");
  if (numeraire == NumeraireKind::CommodityPrice && numeraire_sector >= N)
    throw StructuralError("numeraire sector out of range");
  if (dropped.region >= R) throw StructuralError("dropped-condition region out of range");
  if (dropped.kind == DroppedCondition::Kind::Goods && dropped.sector >= N)
    throw StructuralError("dropped-condition sector out of range");
  if (!foreign_transfers_fixed)
    throw StructuralError("only the fixed-foreign-transfers closure is supported");
}

void SolverConfig::check() const {
  if (max_iterations < 0) throw StructuralError("max_iterations must be nonnegative");
  if (!(tolerance > 0.0)) throw StructuralError("tolerance must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) throw StructuralError("damping must lie in (0,1]");
  if (!(fd_step > 0.0)) throw StructuralError("finite-difference step must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw StructuralError("shrink factor must lie in (0,1)");
  if (!(price_floor > 0.0)) throw StructuralError("price floor must be positive");
}

std::string SystemLayout::describe_row(const ParameterSet& p, std::size_t row) const {
  const std::size_t r = row / block();
  std::size_t k = row % block();
  const auto& rn = p.dims.regions()[r];
  if (k < n_sectors) return fmt::format("goods market {}/{}", rn, p.dims.sectors()[k]);
  k -= n_sectors;
  if (k < n_sectors) return fmt::format("zero profit {}/{}", rn, p.dims.sectors()[k]);
  k -= n_sectors;
  if (k < n_skills) return fmt::format("labour market {}/{}", rn, p.dims.skills()[k]);
  k -= n_skills;
  if (k < n_sectors) return fmt::format("capital market {}/{}", rn, p.dims.sectors()[k]);
  return fmt::format("savings-investment {}", rn);
}

std::vector<double> pack_unknowns(const EconomyState& s, const ParameterSet& p) {
  const SystemLayout L(p);
  std::vector<double> x(L.size());
  auto lg = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError(fmt::format("{} {} must be positive to enter the solver", what, v));
    return std::log(v);
  };
  for (std::size_t r = 0; r < L.n_regions; ++r) {
    for (std::size_t i = 0; i < L.n_sectors; ++i) {
      x[L.pd(r, i)] = lg(s.pd(r, i), "price");
      x[L.xd(r, i)] = lg(s.output(r, i), "output");
      x[L.rent(r, i)] = lg(s.rent(r, i), "rent");
    }
    for (std::size_t e = 0; e < L.n_skills; ++e) x[L.wage(r, e)] = lg(s.wage(r, e), "wage");
    x[L.inv(r)] = lg(s.investment[r], "investment");
  }
  return x;
}

namespace {

void require_finite(const std::vector<double>& f, const ParameterSet& p) {
  const SystemLayout L(p);
  for (std::size_t k = 0; k < f.size(); ++k)
    if (!std::isfinite(f[k]))
      throw NumericalError(fmt::format("non-finite residual in {}", L.describe_row(p, k)));
}

// A path that has run away (say, TFP overflowing after an outsized R&D shock)
// is reported here rather than as a solver breakdown.
void require_finite_exogenous(const EconomyState& s, const ParameterSet& p) {
  const auto& dims = p.dims;
  for (std::size_t r = 0; r < dims.n_regions(); ++r) {
    const auto& rn = dims.regions()[r];
    for (std::size_t i = 0; i < dims.n_sectors(); ++i) {
      if (!(s.tfp(r, i) > 0.0) || !std::isfinite(s.tfp(r, i)))
        throw NumericalError(fmt::format("TFP {}/{} is {}", rn, dims.sectors()[i], s.tfp(r, i)));
      if (!std::isfinite(s.capital(r, i)))
        throw NumericalError(fmt::format("capital {}/{} is {}", rn, dims.sectors()[i], s.capital(r, i)));
    }
    for (std::size_t e = 0; e < dims.n_skills(); ++e)
      if (!std::isfinite(s.labour_supply(r, e)))
        throw NumericalError(fmt::format("labour supply {}/{} is {}", rn, dims.skills()[e], s.labour_supply(r, e)));
  }
}

double max_abs(const Eigen::VectorXd& v) {
  if (!v.allFinite()) return std::numeric_limits<double>::infinity();
  return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

void copy_workspace(const kernels::Workspace& ws, const ParameterSet& p, EconomyState& s) {
  const auto R = p.dims.n_regions();
  const auto N = p.dims.n_sectors();
  const auto S = p.dims.n_skills();
  s.pd = ws.pd;
  s.pa = ws.pa;
  s.pm = ws.pm;
  s.wage = ws.wage;
  s.rent = ws.rent;
  s.pi = ws.pi;
  s.numeraire = ws.numeraire;
  s.output = ws.xd;
  s.absorption = ws.absorption;
  s.domestic = ws.domestic;
  s.imports = ws.imports;
  s.flows = ws.flows;
  s.household = ws.household;
  s.government = ws.government;
  for (std::size_t k = 0; k < s.government.data().size(); ++k)
    s.government.data()[k] += ws.policy.data()[k];
  s.investment = ws.inv;
  s.household_income.assign(R, 0.0);
  for (std::size_t r = 0; r < R; ++r)
    s.household_income[r] = ws.wage_income[r] + ws.capital_income[r] + ws.transfers[r];
  s.income_tax = ws.income_tax;
  s.household_savings = ws.household_savings;
  s.consumption_budget = ws.consumption_budget;
  s.tax_revenue = ws.tax_revenue;
  s.government_savings = ws.government_savings;
  s.government_budget = ws.government_budget;
  s.savings = ws.savings;
  s.gdp.assign(R, 0.0);
  s.gdp_real.assign(R, 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    double nominal = 0.0, real = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const auto& pt = ws.tech[r * N + i];
      const double y = ws.xd(r, i);
      double va = ws.rent(r, i) * pt.per_unit.capital;
      for (std::size_t e = 0; e < S; ++e) va += ws.wage(r, e) * pt.per_unit.labour[e];
      nominal += (va + p.production_tax_rate(r, i) * pt.unit_cost) * y;
      double inputs = pt.per_unit.electricity + pt.per_unit.fuel;
      for (double m : pt.per_unit.materials) inputs += m;
      real += (1.0 - inputs) * y;
    }
    s.gdp[r] = nominal;
    s.gdp_real[r] = real;
  }
}

}  // namespace

std::vector<double> excess_demands(const EconomyState& s, const ParameterSet& p,
                                   const ClosureSpec& c) {
  c.check(p);
  kernels::EvalContext ctx(p, c, s);
  kernels::Workspace ws(p);
  const auto x = pack_unknowns(s, p);
  std::vector<double> f(x.size());
  kernels::evaluate_ref(ctx, x.data(), ws, f.data());
  require_finite(f, p);
  return f;
}

double walras_residual(const EconomyState& s, const ParameterSet& p, const ClosureSpec& c) {
  kernels::EvalContext ctx(p, c, s);
  kernels::Workspace ws(p);
  const auto x = pack_unknowns(s, p);
  kernels::evaluate_ref(ctx, x.data(), ws, nullptr);
  return kernels::dropped_residual(ctx, ws);
}

double walras_sum(const EconomyState& s, const ParameterSet& p, const ClosureSpec& c) {
  kernels::EvalContext ctx(p, c, s);
  kernels::Workspace ws(p);
  const auto x = pack_unknowns(s, p);
  kernels::evaluate_ref(ctx, x.data(), ws, nullptr);
  return kernels::walras_sum(ctx, ws);
}

void complete_state(EconomyState& s, const ParameterSet& p, const ClosureSpec& c) {
  kernels::EvalContext ctx(p, c, s);
  kernels::Workspace ws(p);
  const auto x = pack_unknowns(s, p);
  kernels::evaluate_ref(ctx, x.data(), ws, nullptr);
  copy_workspace(ws, p, s);
}

std::vector<double> trade_balance_residuals(const EconomyState& s, const ParameterSet& p,
                                            const ClosureSpec& c) {
  kernels::EvalContext ctx(p, c, s);
  kernels::Workspace ws(p);
  const auto x = pack_unknowns(s, p);
  kernels::evaluate_ref(ctx, x.data(), ws, nullptr);
  const auto R = p.dims.n_regions();
  const auto N = p.dims.n_sectors();
  std::vector<double> out(R);
  for (std::size_t r = 0; r < R; ++r) {
    double imports = 0.0, exports = 0.0, margins = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t o = 0; o < R; ++o) {
        imports += ws.delivered(r * N + i, o) * ws.flows(o, r, i) *
                   (p.trade.nest(r, i).tradable ? 1.0 : 0.0);
        exports += ws.pd(r, i) * ws.flows(r, o, i);
        margins += ws.pd(r, p.transport) * p.trade.margin(r, o, i) * ws.flows(r, o, i);
      }
    const double rhs = ws.foreign_transfers[r] + (s.demand_shock[r] - s.levy[r]) * ws.numeraire;
    const double lhs = imports - exports - margins;
    const double scale = std::max({imports, exports, std::abs(rhs)});
    out[r] = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
  }
  return out;
}

namespace {

std::string near_dependent_rows(const Eigen::MatrixXd& jac, const ParameterSet& p) {
  const SystemLayout L(p);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullU);
  const auto n = jac.rows();
  const Eigen::VectorXd u = svd.matrixU().col(n - 1);
  std::vector<std::string> names;
  for (Eigen::Index k = 0; k < n; ++k)
    if (std::abs(u[k]) > 0.1) names.push_back(L.describe_row(p, static_cast<std::size_t>(k)));
  return fmt::format("{}", fmt::join(names, "; "));
}

}  // namespace

SolveResult solve_period(const EconomyState& guess, const ParameterSet& p, const ClosureSpec& c,
                         const SolverConfig& cfg) {
  c.check(p);
  cfg.check();
  require_finite_exogenous(guess, p);
  const SystemLayout L(p);
  kernels::EvalContext ctx(p, c, guess);
  kernels::Workspace ws(p);
  const auto x0 = pack_unknowns(guess, p);
  const auto n = static_cast<Eigen::Index>(x0.size());
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
  Eigen::VectorXd f(n), f_try(n), x_try(n), dx(n);
  Eigen::MatrixXd jac;
  const double log_floor = std::log(cfg.price_floor);

  auto eval = [&](const Eigen::VectorXd& at, Eigen::VectorXd& out) {
    try {
      kernels::evaluate(ctx, at.data(), ws, out.data(), cfg.parallel);
    } catch (const DomainError&) {
      out.setConstant(std::numeric_limits<double>::quiet_NaN());
    }
  };
  auto floor_prices = [&](Eigen::VectorXd& v) {
    for (std::size_t r = 0; r < L.n_regions; ++r) {
      for (std::size_t i = 0; i < L.n_sectors; ++i) {
        v[L.pd(r, i)] = std::max(v[L.pd(r, i)], log_floor);
        v[L.rent(r, i)] = std::max(v[L.rent(r, i)], log_floor);
      }
      for (std::size_t e = 0; e < L.n_skills; ++e) v[L.wage(r, e)] = std::max(v[L.wage(r, e)], log_floor);
    }
  };
  auto to_state = [&](const Eigen::VectorXd& at) {
    EconomyState s = guess;
    kernels::evaluate(ctx, at.data(), ws, nullptr, false);
    copy_workspace(ws, p, s);
    return s;
  };

  SolveReport rep;
  eval(x, f);
  {
    std::vector<double> fv(f.data(), f.data() + n);
    require_finite(fv, p);
  }
  double norm = max_abs(f);
  rep.trace.push_back({0, norm, 0.0});

  int iter = 0;
  while (norm > cfg.tolerance) {
    if (iter >= cfg.max_iterations) {
      rep.iterations = iter;
      rep.max_residual = norm;
      rep.message = fmt::format("no convergence after {} iterations (residual {:.3e})", iter, norm);
      throw SolveFailure(rep.message, to_state(x), rep);
    }
    if (cfg.parallel)
      kernels::jacobian_fd_omp(ctx, x, f, cfg.fd_step, jac);
    else
      kernels::jacobian_fd_ref(ctx, x, f, cfg.fd_step, jac);
    if (!jac.allFinite()) {
      rep.iterations = iter;
      rep.max_residual = norm;
      rep.message = "non-finite Jacobian entry";
      throw SolveFailure(rep.message, to_state(x), rep);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    if (!(lu.rcond() > 1e-14)) {
      rep.iterations = iter;
      rep.max_residual = norm;
      rep.message = fmt::format("singular Jacobian; near-dependent rows: {}",
                                near_dependent_rows(jac, p));
      throw SolveFailure(rep.message, to_state(x), rep);
    }
    dx = lu.solve(-f);

    double t = cfg.damping;
    bool accepted = false;
    for (int b = 0; b <= cfg.max_backtracks; ++b) {
      x_try = x + t * dx;
      floor_prices(x_try);
      eval(x_try, f_try);
      const double trial = max_abs(f_try);
      if (trial <= (1.0 - 1e-4 * t) * norm) {
        accepted = true;
        break;
      }
      t *= cfg.shrink;
    }
    ++iter;
    if (!accepted) {
      rep.iterations = iter;
      rep.max_residual = norm;
      rep.message = fmt::format("line search failed at iteration {} (residual {:.3e})", iter, norm);
      throw SolveFailure(rep.message, to_state(x), rep);
    }
    x = x_try;
    f = f_try;
    norm = max_abs(f);
    rep.trace.push_back({iter, norm, t});
  }

  // Impose the numeraire exactly; the system is homogeneous of degree zero in prices.
  kernels::evaluate(ctx, x.data(), ws, nullptr, false);
  const double shift = std::log(ws.numeraire);
  for (std::size_t r = 0; r < L.n_regions; ++r) {
    for (std::size_t i = 0; i < L.n_sectors; ++i) {
      x[L.pd(r, i)] -= shift;
      x[L.rent(r, i)] -= shift;
    }
    for (std::size_t e = 0; e < L.n_skills; ++e) x[L.wage(r, e)] -= shift;
  }

  SolveResult out;
  out.state = to_state(x);
  rep.converged = true;
  rep.iterations = iter;
  eval(x, f);
  rep.max_residual = max_abs(f);
  rep.walras = kernels::dropped_residual(ctx, ws);
  out.report = std::move(rep);
  return out;
}

}  // namespace sgem
