#include <Eigen/Dense>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

#include "sgem/equilibrium.hpp"
#include "sgem/kernels.hpp"

using namespace sgem;
using test::rel;

namespace {

using test::max_rel;
using test::real_quantities;
using test::set_unknowns;
using test::tatonnement;

EconomyState tfp_shocked(const test::Calibrated& b, std::size_t r, std::size_t i, double factor) {
  auto s = b.start;
  s.tfp(r, i) *= factor;
  return s;
}

}  // namespace

TEST_CASE("benchmark is an equilibrium") {
  for (const char* name : {"toy_2x2", "toy_3x4", "toy_10x6"}) {
    CAPTURE(name);
    const auto& b = test::bundle(name);
    const ClosureSpec c;
    CHECK(test::max_abs(excess_demands(b.start, b.cal.params, c)) < 1e-12);
    CHECK(std::abs(walras_residual(b.start, b.cal.params, c)) < 1e-12);
    const auto res = solve_period(b.start, b.cal.params, c, {});
    CHECK(res.report.converged);
    CHECK(res.report.iterations <= 2);
    CHECK(res.report.max_residual < 1e-8);
    for (const auto* a : {&res.state.pd, &res.state.pa, &res.state.wage, &res.state.rent})
      for (double v : a->data()) CHECK(std::abs(v - 1.0) < 1e-10);
    CHECK(res.state.numeraire == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("a wage change only touches the blocks that depend on it") {
  const auto& b = test::bundle("toy_3x4");
  const auto& p = b.cal.params;
  const SystemLayout L(p);
  const ClosureSpec c;
  const auto base = excess_demands(b.start, p, c);
  auto s = b.start;
  const std::size_t r = 1;
  s.wage(r, 2) *= 1.01;
  const auto f = excess_demands(s, p, c);
  for (std::size_t q = 0; q < L.n_regions; ++q) {
    for (std::size_t row = q * L.block(); row < (q + 1) * L.block(); ++row) {
      const bool goods = row < L.xd(q, 0);
      if (q != r && !goods) {
        CAPTURE(L.describe_row(p, row));
        CHECK(f[row] == base[row]);
      }
    }
  }
  // Own cost, own labour market and own savings react.
  for (std::size_t i = 0; i < L.n_sectors; ++i) CHECK(std::abs(f[L.xd(r, i)]) > 1e-6);
  CHECK(std::abs(f[L.wage(r, 2)]) > 1e-6);
  CHECK(std::abs(f[L.inv(r)]) > 1e-6);
  // Other regions feel it only through their export markets.
  double export_effect = 0.0;
  for (std::size_t q = 0; q < L.n_regions; ++q)
    if (q != r)
      for (std::size_t i = 0; i < L.n_sectors; ++i) export_effect += std::abs(f[L.pd(q, i)]);
  CHECK(export_effect > 0.0);
}

TEST_CASE("Walras law holds off equilibrium") {
  const auto& b = test::bundle("toy_10x6");
  const auto& p = b.cal.params;
  const ClosureSpec c;
  ToyRng rng(3);
  auto x0 = pack_unknowns(b.start, p);
  for (int k = 0; k < 20; ++k) {
    auto x = x0;
    for (double& v : x) v += rng.uniform(-0.05, 0.05);
    auto s = b.start;
    set_unknowns(s, p, x);
    CHECK(std::abs(walras_sum(s, p, c)) < 1e-10);
    CHECK(test::max_abs(excess_demands(s, p, c)) > 1e-4);
  }
}

TEST_CASE("Newton solution matches a tatonnement oracle after a TFP shock") {
  const auto& b = test::bundle("toy_2x2");
  const auto& p = b.cal.params;
  const ClosureSpec c;
  const auto shocked = tfp_shocked(b, 0, 1, 1.2);
  const auto res = solve_period(shocked, p, c, {});
  REQUIRE(res.report.converged);
  CHECK(std::abs(res.report.walras) < 1e-8);

  auto oracle = shocked;
  set_unknowns(oracle, p, tatonnement(shocked, p, c));
  CHECK(test::max_abs(excess_demands(oracle, p, c)) < 1e-10);
  complete_state(oracle, p, c);
  for (auto [a, o] : {std::pair{&res.state.pd, &oracle.pd}, {&res.state.pa, &oracle.pa},
                      {&res.state.pm, &oracle.pm}, {&res.state.wage, &oracle.wage},
                      {&res.state.rent, &oracle.rent}})
    CHECK(max_rel(a->data(), o->data()) < 1e-4);
  CHECK(max_rel(res.state.pi, oracle.pi) < 1e-4);
  // The shocked sector's price falls relative to the benchmark.
  CHECK(res.state.pd(0, 1) < 1.0);
}

TEST_CASE("the price system is homogeneous of degree zero") {
  const auto& b = test::bundle("toy_3x4");
  const auto& p = b.cal.params;
  const ClosureSpec c;
  const auto solved = solve_period(tfp_shocked(b, 2, 0, 1.2), p, c, {}).state;

  const double lambda = 2.0;
  auto scaled = solved;
  for (auto* a : {&scaled.pd, &scaled.wage, &scaled.rent})
    for (double& v : a->data()) v *= lambda;
  const auto f0 = excess_demands(solved, p, c);
  const auto f1 = excess_demands(scaled, p, c);
  const SystemLayout L(p);
  for (std::size_t row = 0; row < f0.size(); ++row) {
    if (row == L.dropped_row(c.dropped)) {
      CHECK(f1[row] == doctest::Approx(lambda - 1.0).epsilon(1e-12));
      continue;
    }
    CHECK(std::abs(f1[row] - f0[row]) < 1e-12);
  }
  complete_state(scaled, p, c);
  CHECK(max_rel(real_quantities(scaled), real_quantities(solved)) < 1e-10);
  CHECK(rel(scaled.gdp[0], lambda * solved.gdp[0]) < 1e-12);

  // Re-fixing the numeraire from the doubled prices returns the same allocation.
  const auto again = solve_period(scaled, p, c, {}).state;
  CHECK(max_rel(real_quantities(again), real_quantities(solved)) < 1e-10);
  CHECK(max_rel(again.pd.data(), solved.pd.data()) < 1e-10);
}

TEST_CASE("the solution does not depend on which market is dropped") {
  const auto& b = test::bundle("toy_3x4");
  const auto& p = b.cal.params;
  const auto shocked = tfp_shocked(b, 1, 3, 1.2);
  ClosureSpec a;
  ClosureSpec g;
  g.dropped = {DroppedCondition::Kind::Goods, 2, 1};
  ClosureSpec si;
  si.dropped = {DroppedCondition::Kind::SavingsInvestment, 2, 0};
  const auto ra = solve_period(shocked, p, a, {});
  for (const auto& other : {g, si}) {
    const auto rb = solve_period(shocked, p, other, {});
    CHECK(std::abs(rb.report.walras) < 1e-8);
    CHECK(max_rel(ra.state.pd.data(), rb.state.pd.data()) < 1e-8);
    CHECK(max_rel(ra.state.wage.data(), rb.state.wage.data()) < 1e-8);
    CHECK(max_rel(real_quantities(ra.state), real_quantities(rb.state)) < 1e-8);
  }
  // The dropped market clears without being imposed.
  CHECK(std::abs(walras_residual(ra.state, p, g)) < 1e-8);
}

TEST_CASE("GDP and trade balance identities at solved states") {
  for (const char* name : {"toy_3x4", "toy_10x6"}) {
    const auto& b = test::bundle(name);
    const auto& p = b.cal.params;
    const ClosureSpec c;
    const auto R = p.dims.n_regions();
    const auto N = p.dims.n_sectors();
    auto shocked = tfp_shocked(b, 0, 0, 1.2);
    shocked.demand_shock[1] = 0.5;
    shocked.levy[0] = 0.5;
    const auto res = solve_period(shocked, p, c, {});
    const auto& s = res.state;
    CHECK(std::abs(res.report.walras) < 1e-8);
    CHECK(test::max_abs(trade_balance_residuals(s, p, c)) < 1e-8);
    for (std::size_t r = 0; r < R; ++r) {
      // Expenditure side at basic prices: final demand + exports + margin services - imports.
      double exp_side = s.pi[r] * s.investment[r];
      for (std::size_t i = 0; i < N; ++i) {
        exp_side += s.pa(r, i) * (s.household(r, i) + s.government(r, i));
        exp_side -= s.pm(r, i) * s.imports(r, i);
        for (std::size_t q = 0; q < R; ++q) {
          exp_side += s.pd(r, i) * s.flows(r, q, i);
          exp_side += s.pd(r, p.transport) * p.trade.margin(r, q, i) * s.flows(r, q, i);
        }
      }
      CAPTURE(name);
      CAPTURE(r);
      CHECK(rel(exp_side, s.gdp[r]) < 1e-8);
    }
  }
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
  const auto& b = test::bundle("toy_10x6");
  const auto& p = b.cal.params;
  const ClosureSpec c;
  auto exo = tfp_shocked(b, 3, 2, 1.2);
  const kernels::EvalContext ctx(p, c, exo);
  auto x = pack_unknowns(exo, p);
  ToyRng rng(9);
  for (double& v : x) v += rng.uniform(-0.02, 0.02);
  const auto n = x.size();
  kernels::Workspace w1(p), w2(p);
  std::vector<double> f1(n), f2(n);
  kernels::evaluate_ref(ctx, x.data(), w1, f1.data());
  kernels::evaluate_omp(ctx, x.data(), w2, f2.data());
  CHECK(f1 == f2);
  CHECK(kernels::walras_sum(ctx, w1) == kernels::walras_sum(ctx, w2));

  const Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), n);
  const Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(f1.data(), n);
  Eigen::MatrixXd j1(n, n), j2(n, n);
  kernels::jacobian_fd_ref(ctx, xv, fv, 1e-7, j1);
  kernels::jacobian_fd_omp(ctx, xv, fv, 1e-7, j2);
  CHECK((j1.array() == j2.array()).all());

  SolverConfig serial;
  serial.parallel = false;
  const auto a = solve_period(exo, p, c, serial);
  const auto bpar = solve_period(exo, p, c, {});
  CHECK(a.state == bpar.state);
  CHECK(a.report.iterations == bpar.report.iterations);
}

TEST_CASE("solver reports and failures") {
  const auto& b = test::bundle("toy_10x6");
  const auto& p = b.cal.params;
  const ClosureSpec c;
  auto shocked = b.start;
  for (double& a : shocked.tfp.data()) a *= 1.2;
  const auto ok = solve_period(shocked, p, c, {});
  REQUIRE(ok.report.converged);
  for (std::size_t k = 1; k < ok.report.trace.size(); ++k)
    CHECK(ok.report.trace[k].max_residual < ok.report.trace[k - 1].max_residual);
  CHECK(ok.report.trace.back().max_residual <= 1e-10);
  for (const auto* a : {&ok.state.pd, &ok.state.wage, &ok.state.rent})
    for (double v : a->data()) CHECK(v >= SolverConfig{}.price_floor);

  SolverConfig tight;
  tight.max_iterations = 1;
  try {
    solve_period(shocked, p, c, tight);
    FAIL("expected SolveFailure");
  } catch (const SolveFailure& e) {
    CHECK(std::string(e.what()).find("no convergence") != std::string::npos);
    CHECK(e.report().trace.size() == 2);
    CHECK(e.report().trace[1].max_residual < e.report().trace[0].max_residual);
    CHECK(e.best().output.rows() == p.dims.n_regions());
  }

  SolverConfig bad;
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(solve_period(shocked, p, c, bad), StructuralError);
  ClosureSpec wrong;
  wrong.numeraire_region = 99;
  CHECK_THROWS_AS(wrong.check(p), StructuralError);
  auto neg = shocked;
  neg.pd(0, 0) = -1.0;
  CHECK_THROWS_AS(solve_period(neg, p, c, {}), DomainError);

  auto runaway = shocked;
  runaway.tfp(3, 2) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(solve_period(runaway, p, c, {}), doctest::Contains("TFP R04"), NumericalError);

  // A domain error raised inside the parallel region reaches the caller.
  const SystemLayout L(p);
  kernels::EvalContext ctx(p, c, shocked);
  kernels::Workspace ws(p);
  auto x = pack_unknowns(shocked, p);
  x[L.pd(5, 1)] = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> f(x.size());
  CHECK_THROWS_AS(kernels::evaluate(ctx, x.data(), ws, f.data(), true), DomainError);
  CHECK_THROWS_AS(kernels::evaluate(ctx, x.data(), ws, f.data(), false), DomainError);
}
