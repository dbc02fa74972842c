#include <benchmark/benchmark.h>

#include <pdmplab/analysis.hpp>
#include <pdmplab/flow.hpp>
#include <pdmplab/simulate.hpp>
#include <pdmplab/solver.hpp>
#include <pdmplab/two_switch.hpp>

using namespace pdmplab;

namespace {
const SwitchingParams kP(2.0, 1.0, 1.0, 2.0);
}

static void BM_FlowForward(benchmark::State& state) {
  Point2 x{0.5, 0.4};
  for (auto _ : state) {
    benchmark::DoNotOptimize(x = flow_forward(kP, Regime::zero, 1e-3, flow_forward(kP, Regime::one, 1e-3, x)));
  }
  state.SetItemsProcessed(2 * state.iterations());
}
BENCHMARK(BM_FlowForward);

static void BM_InvertTwoSwitch(benchmark::State& state) {
  const Point2 y = two_switch_backward(kP, {0.5, 0.5}, 0.3, 0.15);
  for (auto _ : state) {
    benchmark::DoNotOptimize(invert_two_switch(kP, {0.5, 0.5}, y, Branch::right));
  }
}
BENCHMARK(BM_InvertTwoSwitch);

static void BM_Simulate(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(kP, kDefaultInitial, n, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(1 << 14)->Arg(1 << 18);

static void BM_CornerAccumulator(benchmark::State& state) {
  const EventLog log = simulate(kP, kDefaultInitial, 1 << 16, 1);
  for (auto _ : state) {
    CornerMassAccumulator acc(kP, default_eps_grid(), Regime::zero, default_burn_in(kP));
    for (std::size_t k = 0; k < log.segment_count(); ++k) acc.add(log.segment(k));
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(log.segment_count()));
}
BENCHMARK(BM_CornerAccumulator);

static void BM_CdfFixedPoint(benchmark::State& state) {
  SolverConfig cfg;
  cfg.grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cdf_fixed_point(kP, cfg));
}
BENCHMARK(BM_CdfFixedPoint)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

static void BM_Q2PowerIteration(benchmark::State& state) {
  SolverConfig cfg;
  cfg.grid = static_cast<int>(state.range(0));
  cfg.tol = 1e-5;
  for (auto _ : state) benchmark::DoNotOptimize(q2_power_iteration(kP, cfg));
}
BENCHMARK(BM_Q2PowerIteration)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
