#include <benchmark/benchmark.h>

#include "rcrl/approx/mlp.hpp"

namespace {

using namespace rcrl;

approx::Mlp Net(int in, int width, int out) {
  approx::MlpShape s;
  s.sizes = {in, width, width, out};
  approx::Mlp net(s);
  CounterRng rng(1);
  net.InitHeUniform(rng);
  return net;
}

// Critic-shaped network (state + action in, scalar out) on a batch.
void BM_MlpForward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0)), batch = static_cast<int>(state.range(1));
  const approx::Mlp net = Net(3, width, 1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, batch);
  for (auto _ : state) {
    Eigen::MatrixXd y = net.Forward(x);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpForward)->Args({64, 256})->Args({256, 256})->Args({256, 512});

void BM_MlpForwardBackward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0)), batch = static_cast<int>(state.range(1));
  const approx::Mlp net = Net(3, width, 1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, batch);
  const Eigen::MatrixXd up = Eigen::MatrixXd::Constant(1, batch, 1.0 / batch);
  Eigen::VectorXd g(net.params().size());
  for (auto _ : state) {
    approx::MlpTape tape;
    net.Forward(x, &tape);
    g.setZero();
    Eigen::MatrixXd gx = net.Backward(tape, up, &g);
    benchmark::DoNotOptimize(gx.data());
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpForwardBackward)->Args({64, 256})->Args({256, 256})->Args({256, 512});

}  // namespace

BENCHMARK_MAIN();
