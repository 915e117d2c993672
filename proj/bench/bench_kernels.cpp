// Serial reference kernels against their OpenMP versions on the 10x6 toy, at a
// TFP-shocked state so every block does real work. Thread count: SGEM_THREADS.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "sgem/calibration.hpp"
#include "sgem/equilibrium.hpp"
#include "sgem/kernels.hpp"
#include "sgem/toy.hpp"

using namespace sgem;

namespace {

struct Fixture {
  ParameterSet params;
  EconomyState state;
  ClosureSpec closure;
  Eigen::VectorXd x;

  Fixture() {
    const auto toy = make_toy({10, 6, 42});
    params = calibrate(toy.data, toy.dynamics, GrowthParams::defaults(), {}).params;
    state = benchmark_state(toy.data, params);
    for (double& a : state.tfp.data()) a *= 1.1;
    const auto packed = pack_unknowns(state, params);
    x = Eigen::Map<const Eigen::VectorXd>(packed.data(), static_cast<Eigen::Index>(packed.size()));
    x.array() += 0.01;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

template <auto Kernel>
void bm_evaluate(benchmark::State& st) {
  const auto& fx = fixture();
  const kernels::EvalContext ctx(fx.params, fx.closure, fx.state);
  kernels::Workspace ws(fx.params);
  Eigen::VectorXd f(fx.x.size());
  for (auto _ : st) {
    Kernel(ctx, fx.x.data(), ws, f.data());
    benchmark::DoNotOptimize(f.data());
  }
  st.counters["unknowns"] = static_cast<double>(fx.x.size());
}

template <auto Kernel>
void bm_jacobian(benchmark::State& st) {
  const auto& fx = fixture();
  const kernels::EvalContext ctx(fx.params, fx.closure, fx.state);
  kernels::Workspace ws(fx.params);
  Eigen::VectorXd f0(fx.x.size());
  kernels::evaluate_ref(ctx, fx.x.data(), ws, f0.data());
  Eigen::MatrixXd jac;
  for (auto _ : st) {
    Kernel(ctx, fx.x, f0, 1e-7, jac);
    benchmark::DoNotOptimize(jac.data());
  }
  st.counters["threads"] = kernels::thread_count();
}

}  // namespace

BENCHMARK(bm_evaluate<kernels::evaluate_ref>)->Name("evaluate/ref");
BENCHMARK(bm_evaluate<kernels::evaluate_omp>)->Name("evaluate/omp");
BENCHMARK(bm_jacobian<kernels::jacobian_fd_ref>)->Name("jacobian/ref")->Unit(benchmark::kMillisecond);
BENCHMARK(bm_jacobian<kernels::jacobian_fd_omp>)->Name("jacobian/omp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
