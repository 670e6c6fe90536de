#include <benchmark/benchmark.h>

#include "rcrl/envs/double_integrator.hpp"
#include "rcrl/envs/quadrotor.hpp"
#include "rcrl/rac/learner.hpp"
#include "rcrl/rac/trainer.hpp"

namespace {

using namespace rcrl;

// One learner step (both critics, targets, actor and multiplier) on a
// batch drawn from random on-policy-looking transitions.
template <typename Env>
void BM_LearnerUpdate(benchmark::State& state) {
  rac::TuneAllocator();
  const Env env;
  rac::TrainerConfig cfg;
  cfg.hidden_width = static_cast<int>(state.range(0));
  cfg.batch_size = static_cast<int>(state.range(1));
  cfg.actor_interval = 1;
  cfg.multiplier_interval = 1;
  rac::Learner learner(env.spec(), cfg, CounterRng(1));
  CounterRng rng(2);
  std::vector<Transition> ts;
  for (int i = 0; i < cfg.batch_size; ++i) {
    const StateVec s = env.Canonicalize(env.Reset(rng));
    ActionVec a(env.spec().action_dim);
    for (int k = 0; k < a.size(); ++k) {
      a[k] = rng.Uniform(env.spec().action_low[k], env.spec().action_high[k]);
    }
    ts.push_back(env.Step(s, a));
  }
  const rac::Batch batch = rac::MakeBatch(ts, cfg.constraint, env.spec().dt);
  std::int64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(learner.Update(batch, k++));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LearnerUpdate<envs::DoubleIntegrator>)->Args({64, 256})->Args({256, 256});
BENCHMARK(BM_LearnerUpdate<envs::Quadrotor2D>)->Args({256, 256});

}  // namespace

BENCHMARK_MAIN();
