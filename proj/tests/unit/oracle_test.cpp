#include <cmath>

#include <gtest/gtest.h>

#include "rcrl/core/errors.hpp"
#include "rcrl/envs/double_integrator.hpp"
#include "rcrl/oracle/sbe.hpp"

namespace rcrl::oracle {
namespace {

StateVec V(double a, double b) {
  StateVec v(2);
  v << a, b;
  return v;
}

OracleConfig Cfg(int n, double gamma = 0.99) {
  OracleConfig c;
  c.gamma = gamma;
  c.pad_cells = (n - 1) / 5;
  return c;
}

// Shared coarse double-integrator solution; 101 nodes keeps each test fast.
class DiOracle : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    grid_ = new GridSpec(GridSpec::Uniform(2, -5, 5, 101));
    sol_ = new SafetyValueSolution(SolveSbe(env_, *grid_, Cfg(101)));
  }
  static void TearDownTestSuite() {
    delete sol_;
    delete grid_;
  }
  static inline const envs::DoubleIntegrator env_{};
  static inline GridSpec* grid_ = nullptr;
  static inline SafetyValueSolution* sol_ = nullptr;
};

TEST(GridSpec, FlattenRoundTrip) {
  const GridSpec g({{-1, 1, 5}, {0, 2, 3}, {3, 4, 4}});
  EXPECT_EQ(g.size(), 60u);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.Flatten(g.Unflatten(i)), i);
  EXPECT_EQ(g.Flatten({0, 0, 1}), 1u);  // last axis fastest
  const StateVec p = g.Point(g.Flatten({4, 2, 3}));
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_DOUBLE_EQ(p[1], 2.0);
  EXPECT_DOUBLE_EQ(p[2], 4.0);
}

TEST(GridSpec, PaddedKeepsSpacing) {
  const GridSpec g = GridSpec::Uniform(2, -5, 5, 11);
  const GridSpec p = g.Padded(3);
  EXPECT_EQ(p.axis(0).count, 17);
  EXPECT_DOUBLE_EQ(p.axis(0).lower, -8.0);
  EXPECT_DOUBLE_EQ(p.axis(0).step(), g.axis(0).step());
}

TEST(ValueGrid, InterpolationIsExactOnBilinearFunctions) {
  ValueGrid vg(GridSpec::Uniform(2, -2, 2, 9));
  auto f = [](double x, double y) { return 1.5 - 2.0 * x + 0.5 * y + 0.25 * x * y; };
  for (std::size_t i = 0; i < vg.spec.size(); ++i) {
    const StateVec p = vg.spec.Point(i);
    vg.values[i] = f(p[0], p[1]);
  }
  CounterRng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.Uniform(-2, 2), y = rng.Uniform(-2, 2);
    EXPECT_NEAR(vg.Interpolate(V(x, y)), f(x, y), 1e-12);
  }
}

TEST(KernelMask, ErodeDilateAndScores) {
  ValueGrid vg(GridSpec::Uniform(2, 0, 6, 7), 1.0);
  for (int i = 2; i <= 4; ++i) {
    for (int j = 2; j <= 4; ++j) vg.values[vg.spec.Flatten({i, j})] = -1.0;
  }
  const KernelMask k = KernelMask::FromValues(vg);
  EXPECT_EQ(k.Count(), 9u);
  EXPECT_EQ(k.Eroded(1).Count(), 1u);
  EXPECT_EQ(k.Dilated(1).Count(), 25u);
  EXPECT_TRUE(IsSubset(k.Eroded(1), k));
  EXPECT_FALSE(IsSubset(k.Dilated(1), k));
  EXPECT_DOUBLE_EQ(IoU(k, k.Dilated(1)), 9.0 / 25.0);
  EXPECT_DOUBLE_EQ(Agreement(k, k.Dilated(1)), 1.0 - 16.0 / 49.0);
  EXPECT_DOUBLE_EQ(k.Area(), 9.0);
}

TEST(OracleConfig, Validation) {
  OracleConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.gamma = 1.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = {};
  c.action_samples = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = {};
  c.tolerance = 0.0;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(SolveSbe, ConstantConstraintIsFixedPoint) {
  envs::ConstantConstraintParams p;
  p.h_value = -1.0;
  const envs::ConstantConstraint env(p);
  const SafetyValueSolution sol = SolveSbe(env, GridSpec::Uniform(2, -5, 5, 21), Cfg(21));
  for (double v : sol.value.values) EXPECT_NEAR(v, -1.0, 1e-12);
  EXPECT_DOUBLE_EQ(sol.Kernel().Fraction(), 1.0);
}

TEST(SolveSbe, RunsOutOfSweeps) {
  const envs::DoubleIntegrator env;
  OracleConfig c = Cfg(21);
  c.max_sweeps = 2;
  EXPECT_THROW(SolveSbe(env, GridSpec::Uniform(2, -5, 5, 21), c), ConvergenceFailure);
}

TEST_F(DiOracle, ExampleStates) {
  EXPECT_LT(sol_->value.Interpolate(V(0, 0)), 0.0);
  EXPECT_GT(sol_->value.Interpolate(V(0, 5)), 0.0);
}

// max{h, .} >= h makes h itself a floor of the fixed point; for h >= 0 that
// implies the (1 - gamma) h floor. For h < 0 the latter does not hold: a cell
// whose successors are all safer than itself has V = h < (1 - gamma) h.
TEST_F(DiOracle, ValueIsBoundedBelowByTheConstraint) {
  const double g = 0.99;
  int below_discounted = 0;
  for (std::size_t i = 0; i < grid_->size(); ++i) {
    const double h = env_.Constraint(grid_->Point(i));
    const double v = sol_->value.values[i];
    ASSERT_GE(v, h - 1e-6);
    if (h >= 0.0) {
      ASSERT_GE(v, (1.0 - g) * h - 1e-6);
    }
    below_discounted += v < (1.0 - g) * h;
  }
  EXPECT_GT(below_discounted, 0);
}

TEST_F(DiOracle, ResidualDecreasesAfterFirstSweep) {
  const auto& r = sol_->residual_history;
  ASSERT_GT(r.size(), 2u);
  for (std::size_t i = 2; i < r.size(); ++i) ASSERT_LE(r[i], r[i - 1] * (1.0 + 1e-12));
  EXPECT_LE(sol_->residual, 1e-6);
}

TEST_F(DiOracle, AgreesWithAnalyticKernel) {
  EXPECT_GE(Agreement(sol_->Kernel(), AnalyticKernel(*grid_)), 0.95);
}

TEST_F(DiOracle, NullPolicyIsNestedAndDrifts) {
  const Policy null = [](const StateVec&) { return ActionVec::Zero(1); };
  const SafetyValueSolution pi = EvaluatePolicySafety(env_, null, *grid_, Cfg(101));
  EXPECT_TRUE(IsSubset(pi.Kernel(), sol_->Kernel().Dilated(1)));
  EXPECT_GT(pi.value.Interpolate(V(0, 1)), 0.0);
  for (std::size_t i = 0; i < grid_->size(); ++i) {
    ASSERT_GE(pi.value.values[i], sol_->value.values[i] - 1e-6);
  }
}

TEST_F(DiOracle, GreedyPolicyAttainsTheOptimum) {
  const GreedySafetyPolicy greedy(env_, *sol_, Cfg(101));
  const Policy pol = [&](const StateVec& s) { return greedy(s); };
  const SafetyValueSolution pi = EvaluatePolicySafety(env_, pol, *grid_, Cfg(101));
  double gap = 0.0;
  for (std::size_t i = 0; i < grid_->size(); ++i) {
    gap = std::max(gap, std::abs(pi.value.values[i] - sol_->value.values[i]));
  }
  EXPECT_LE(gap, 2.0 * 1e-6);
  EXPECT_GE(Agreement(pi.Kernel(), sol_->Kernel()), 0.99);
}

TEST(AnalyticKernel, Examples) {
  const GridSpec g = GridSpec::Uniform(2, -5, 5, 201);
  const KernelMask k = AnalyticKernel(g);
  auto at = [&](double x, double y) {
    return k.feasible[g.Flatten({static_cast<int>(std::lround((x + 5) / 0.05)),
                                 static_cast<int>(std::lround((y + 5) / 0.05))})];
  };
  EXPECT_TRUE(at(0, 0));
  EXPECT_FALSE(at(4, 1.5));
  EXPECT_TRUE(at(4, -1.5));
  EXPECT_FALSE(at(0, 5) && at(2, 5));
}

TEST(SolveSbe, DiscountNesting) {
  const envs::DoubleIntegrator env;
  const GridSpec g = GridSpec::Uniform(2, -5, 5, 61);
  const KernelMask k1 = SolveSbe(env, g, Cfg(61, 0.9)).Kernel();
  const KernelMask k2 = SolveSbe(env, g, Cfg(61, 0.99)).Kernel();
  EXPECT_TRUE(IsSubset(k2, k1.Dilated(1)));
}

TEST(SolveSbe, TighterToleranceDoesNotReduceAgreement) {
  const envs::DoubleIntegrator env;
  const GridSpec g = GridSpec::Uniform(2, -5, 5, 81);
  const KernelMask analytic = AnalyticKernel(g);
  OracleConfig loose = Cfg(81);
  loose.tolerance = 1e-5;
  OracleConfig tight = loose;
  tight.tolerance = 1e-6;
  EXPECT_GE(Agreement(SolveSbe(env, g, tight).Kernel(), analytic),
            Agreement(SolveSbe(env, g, loose).Kernel(), analytic));
}

class Operator : public ::testing::Test {
 protected:
  envs::DoubleIntegrator env;
  GridSpec grid = GridSpec::Uniform(2, -5, 5, 21);
  std::vector<ActionVec> actions = SampleActions(env.spec(), 5);
  TransitionTable table = TransitionTable::Build(
      env, grid, actions, [&](const StateVec& s) { return env.Constraint(s); });
  std::vector<double> h;
  void SetUp() override {
    for (std::size_t i = 0; i < grid.size(); ++i) h.push_back(env.Constraint(grid.Point(i)));
  }
  std::vector<double> Random(CounterRng& rng, double lo, double hi) const {
    std::vector<double> q(grid.size());
    for (double& v : q) v = rng.Uniform(lo, hi);
    return q;
  }
};

TEST_F(Operator, ContractionOnRandomPairs) {
  CounterRng rng(7);
  for (int t = 0; t < 100; ++t) {
    const auto q = Random(rng, -10, 10), q2 = Random(rng, -10, 10);
    ASSERT_LE(ContractionRatio(table, h, 0.99, q, q2), 0.99 + 1e-12);
  }
}

TEST_F(Operator, EqualInputsGiveZeroRatio) {
  CounterRng rng(8);
  const auto q = Random(rng, -1, 1);
  EXPECT_EQ(ContractionRatio(table, h, 0.99, q, q), 0.0);
}

TEST_F(Operator, ConstantShiftGivesExactlyGamma) {
  CounterRng rng(9);
  // Q far above h keeps the max on the Q branch for every cell.
  auto q = Random(rng, 100, 200);
  auto q2 = q;
  for (double& v : q2) v += 1e-3;
  EXPECT_NEAR(ContractionRatio(table, h, 0.99, q, q2), 0.99, 1e-9);
}

TEST_F(Operator, Monotone) {
  CounterRng rng(10);
  for (int t = 0; t < 50; ++t) {
    const auto q = Random(rng, -10, 10);
    auto q2 = q;
    for (double& v : q2) v += rng.Uniform(0, 2);
    const auto b1 = ApplySafetyOperator(table, h, 0.99, q);
    const auto b2 = ApplySafetyOperator(table, h, 0.99, q2);
    for (std::size_t i = 0; i < b1.size(); ++i) ASSERT_LE(b1[i], b2[i]);
  }
}

TEST(ContractionCheck, BelowGamma) {
  CounterRng rng(11);
  OracleConfig c;
  EXPECT_LE(ContractionCheck(c, 100, rng), c.gamma + 1e-12);
}

}  // namespace
}  // namespace rcrl::oracle
