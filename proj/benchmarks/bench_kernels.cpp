#include <benchmark/benchmark.h>

#include <memory>

#include "dualsmooth/rng.hpp"
#include "dualsmooth/separable.hpp"
#include "dualsmooth/solver.hpp"

using namespace dualsmooth;

namespace {

SeparablePenalty make_bank(int blocks) {
  Rng rng(1);
  std::vector<PenaltyPtr> bank;
  bank.reserve(blocks);
  for (int t = 0; t < blocks; ++t) {
    switch (t % 3) {
      case 0:
        bank.push_back(std::make_shared<QuadraticPenalty>(
            Eigen::MatrixXd::Constant(1, 1, rng.uniform(0.5, 2.0))));
        break;
      case 1: {
        Eigen::VectorXd l(1), u(1), m(1);
        l << -1.0;
        u << 1.0;
        m << rng.uniform(0.0, 1.0);
        bank.push_back(std::make_shared<MonitoringPenalty>(l, u, m));
        break;
      }
      default: {
        std::vector<double> knots{-2.0, -1.0, 0.0, 1.0, 2.0};
        std::vector<double> values{3.0, 1.0, 0.0, 1.0, 3.0};
        bank.push_back(std::make_shared<PiecewiseLinearPenalty>(knots, values));
      }
    }
  }
  return SeparablePenalty(std::move(bank));
}

Supervector make_input(int blocks) {
  Rng rng(2);
  Supervector v = Supervector::Zero(blocks, 1);
  for (int t = 0; t < blocks; ++t) v.block(t)[0] = rng.uniform(-3.0, 3.0);
  return v;
}

void value_kernel(benchmark::State& state, Exec exec) {
  const int blocks = static_cast<int>(state.range(0));
  const SeparablePenalty f = make_bank(blocks);
  const Supervector v = make_input(blocks);
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.value(v, exec));
  }
  state.SetItemsProcessed(state.iterations() * blocks);
}

void prox_kernel(benchmark::State& state, Exec exec) {
  const int blocks = static_cast<int>(state.range(0));
  const SeparablePenalty f = make_bank(blocks);
  const Supervector v = make_input(blocks);
  Supervector out = Supervector::Zero(blocks, 1);
  for (auto _ : state) {
    f.prox(v, 0.7, out, exec);
    benchmark::DoNotOptimize(out.data.data());
  }
  state.SetItemsProcessed(state.iterations() * blocks);
}

void BM_value_serial(benchmark::State& state) { value_kernel(state, Exec::Serial); }
void BM_value_parallel(benchmark::State& state) { value_kernel(state, Exec::Parallel); }
void BM_prox_serial(benchmark::State& state) { prox_kernel(state, Exec::Serial); }
void BM_prox_parallel(benchmark::State& state) { prox_kernel(state, Exec::Parallel); }

// whole-solve comparison on a long-horizon smoothing instance
void BM_solve_tracking(benchmark::State& state) {
  const int horizon = static_cast<int>(state.range(0));
  Eigen::MatrixXd f(2, 2), h(1, 2);
  f << 1, 1, 0, 1;
  h << 1, 1;
  auto sys = std::make_shared<LinearSystem>(
      horizon, 2, 1, std::vector<Eigen::MatrixXd>(horizon, f),
      std::vector<Eigen::MatrixXd>(horizon + 1, h));
  std::vector<PenaltyPtr> fp(
      horizon + 1,
      std::make_shared<QuadraticPenalty>(Eigen::MatrixXd::Identity(2, 2)));
  Eigen::VectorXd l(1), u(1), m(1);
  l << -1.0;
  u << 1.0;
  m << 0.0;
  std::vector<PenaltyPtr> gp(horizon + 1,
                             std::make_shared<MonitoringPenalty>(l, u, m));
  Rng rng(3);
  Supervector z = Supervector::Zero(horizon + 1, 1);
  for (int t = 0; t <= horizon; ++t) z.block(t)[0] = rng.uniform(-2.0, 2.0);
  const PrimalProblem p = build_primal(sys, fp, gp, z);
  SolverOptions opts;
  opts.max_iters = 2000;
  opts.tol_gap = 1e-12;  // run the full budget
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_first_order(p, opts).gap);
  }
}

}  // namespace

BENCHMARK(BM_value_serial)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_value_parallel)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_prox_serial)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_prox_parallel)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_solve_tracking)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
