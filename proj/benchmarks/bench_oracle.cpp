#include <benchmark/benchmark.h>

#include "rcrl/envs/double_integrator.hpp"
#include "rcrl/oracle/sbe.hpp"

namespace {

using namespace rcrl;

// One application of the safety operator on an n x n grid (plus padding).
void BM_SafetySweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const envs::DoubleIntegrator env;
  oracle::OracleConfig cfg;
  cfg.pad_cells = (n - 1) / 5;
  const oracle::GridSpec grid = oracle::GridSpec::Uniform(2, -5, 5, n).Padded(cfg.pad_cells);
  const auto actions = oracle::SampleActions(env.spec(), cfg.action_samples);
  const auto table = oracle::TransitionTable::Build(
      env, grid, actions, [&](const StateVec& s) { return env.Constraint(s); });
  std::vector<double> h(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) h[i] = env.Constraint(grid.Point(i));
  std::vector<double> v = h;
  for (auto _ : state) {
    v = oracle::ApplySafetyOperator(table, h, cfg.gamma, v);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_SafetySweep)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

// Full solve at the acceptance settings.
void BM_SolveSbe(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const envs::DoubleIntegrator env;
  oracle::OracleConfig cfg;
  cfg.pad_cells = (n - 1) / 5;
  const oracle::GridSpec grid = oracle::GridSpec::Uniform(2, -5, 5, n);
  for (auto _ : state) {
    const auto sol = oracle::SolveSbe(env, grid, cfg);
    state.counters["sweeps"] = sol.sweeps;
  }
}
BENCHMARK(BM_SolveSbe)->Arg(101)->Arg(201)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
