#include <cmath>

#include <gtest/gtest.h>

#include "reference.hpp"
#include "rcrl/envs/double_integrator.hpp"
#include "rcrl/envs/quadrotor.hpp"

namespace rcrl::envs {
namespace {

StateVec V(std::initializer_list<double> xs) {
  StateVec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

TEST(DoubleIntegrator, ConstraintExamples) {
  EXPECT_DOUBLE_EQ(DiConstraint(V({0, 0})), -5.0);
  EXPECT_DOUBLE_EQ(DiConstraint(V({5, 0})), 0.0);
  EXPECT_DOUBLE_EQ(DiConstraint(V({-6, 2})), 1.0);
}

TEST(DoubleIntegrator, ConstraintIsSymmetric) {
  CounterRng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const StateVec s = V({rng.Uniform(-8, 8), rng.Uniform(-8, 8)});
    ASSERT_EQ(DiConstraint(s), DiConstraint(-s));
  }
}

TEST(DoubleIntegrator, RewardExamples) {
  EXPECT_DOUBLE_EQ(DiReward(V({0, 0}), V({0})), 0.0);
  EXPECT_DOUBLE_EQ(DiReward(V({1, 0}), V({0})), -1.0);
  EXPECT_DOUBLE_EQ(DiReward(V({3, 4}), V({0.5})), -25.25);
}

TEST(DoubleIntegrator, StepExamples) {
  const DoubleIntegrator env;
  Transition t = env.Step(V({0, 0}), V({0}));
  EXPECT_EQ(t.s_next, V({0, 0}));
  EXPECT_DOUBLE_EQ(t.h, -5.0);
  EXPECT_EQ(t.c, 0);

  t = env.Step(V({0, 1}), V({0}));
  EXPECT_DOUBLE_EQ(t.s_next[0], 0.1);
  EXPECT_DOUBLE_EQ(t.s_next[1], 1.0);
}

TEST(DoubleIntegrator, ResetStaysInBox) {
  const DoubleIntegrator env;
  CounterRng rng(2);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_LE(env.Reset(rng).lpNorm<Eigen::Infinity>(), 5.0);
  }
}

TEST(DoubleIntegrator, BoundaryExitIsTerminal) {
  const DoubleIntegrator env;
  const Transition t = env.Step(V({9.99, 1.0}), V({0}));
  EXPECT_TRUE(t.terminal());
  EXPECT_GT(t.h_next, 0.0);
  EXPECT_FALSE(env.Step(V({6.0, 1.0}), V({0})).terminal());
}

TEST(Quadrotor, ConstraintExamples) {
  StateVec s = StateVec::Zero(kQuadStateDim);
  s[kQuadZIndex] = 1.0;
  EXPECT_NEAR(QuadConstraint(s), -0.5, 1e-15);
  s[kQuadZIndex] = 0.4;
  EXPECT_NEAR(QuadConstraint(s), 0.1, 1e-15);
  s[kQuadZIndex] = 1.5;
  EXPECT_DOUBLE_EQ(QuadConstraint(s), 0.0);
  s[kQuadZIndex] = 1.6;
  const Quadrotor2D env;
  const Transition t = env.Step(env.Canonicalize(s), env.HoverAction());
  EXPECT_NEAR(t.h, 0.1, 1e-12);
  EXPECT_EQ(t.c, 1);
}

TEST(Quadrotor, RewardExamples) {
  const Quadrotor2D env;
  const StateVec ref = env.Waypoint(17);
  const ActionVec a_ref = env.HoverAction();
  EXPECT_DOUBLE_EQ(QuadReward(ref, a_ref, ref, a_ref), 0.0);
  StateVec x = ref;
  x[kQuadZIndex] += 0.1;
  EXPECT_NEAR(QuadReward(x, a_ref, ref, a_ref), -0.1, 1e-12);
  x = ref;
  x[5] += 1.0;
  EXPECT_NEAR(QuadReward(x, a_ref, ref, a_ref), -0.2, 1e-12);
}

TEST(Quadrotor, RewardMatchesMatrixForm) {
  CounterRng rng(3);
  for (int i = 0; i < 1000; ++i) {
    StateVec x(6), ref(6);
    for (int k = 0; k < 6; ++k) {
      x[k] = rng.Uniform(-3, 3);
      ref[k] = rng.Uniform(-3, 3);
    }
    const ActionVec a = V({rng.Uniform(0, 1), rng.Uniform(0, 1)});
    const ActionVec a_ref = V({rng.Uniform(0, 1), rng.Uniform(0, 1)});
    const double got = QuadReward(x, a, ref, a_ref);
    const double want = testing::ReferenceQuadReward(x, a, ref, a_ref);
    ASSERT_NEAR(got, want, 1e-12 * std::max(1.0, std::abs(want)));
    ASSERT_LE(got, 0.0);
  }
}

TEST(Quadrotor, RewardZeroOnlyAtReference) {
  const Quadrotor2D env;
  const StateVec ref = env.Waypoint(0);
  CounterRng rng(4);
  for (int i = 0; i < 100; ++i) {
    StateVec x = ref;
    x[static_cast<int>(rng() % 6)] += rng.Uniform(0.01, 1.0);
    ASSERT_LT(QuadReward(x, env.HoverAction(), ref, env.HoverAction()), 0.0);
  }
}

TEST(Quadrotor, HoverKeepsVerticalAndAngularRates) {
  const Quadrotor2DParams p;
  StateVec x = StateVec::Zero(6);
  x[2] = 1.0;
  x[3] = 0.3;
  const StateVec next = QuadDynamics(x, V({0.5, 0.5}), p.dt, p);
  EXPECT_NEAR(next[3], 0.3, 1e-12);
  EXPECT_NEAR(next[5], 0.0, 1e-12);
}

TEST(Quadrotor, SymmetricThrustHasNoAngularAcceleration) {
  const Quadrotor2DParams p;
  StateVec x = StateVec::Zero(6);
  x[5] = 0.7;
  for (double u : {0.0, 0.3, 0.9}) {
    const StateVec next = QuadDynamics(x, V({u, u}), p.dt, p);
    EXPECT_NEAR(next[5], 0.7, 1e-12);
  }
}

TEST(Quadrotor, ZeroThrustIsFreeFall) {
  const Quadrotor2DParams p;
  const StateVec x = StateVec::Zero(6);
  const StateVec next = QuadDynamics(x, V({0.0, 0.0}), p.dt, p);
  EXPECT_NEAR((next[3] - x[3]) / p.dt, -p.gravity, 1e-12);
}

TEST(Quadrotor, ResetRanges) {
  const Quadrotor2D env;
  CounterRng rng(5);
  const auto ranges = Quadrotor2D::InitRanges();
  EXPECT_EQ(ranges[0][0], -1.5);
  EXPECT_EQ(ranges[2][1], 1.75);
  for (int i = 0; i < 1000; ++i) {
    const StateVec s = env.Reset(rng);
    ASSERT_EQ(s.size(), kQuadStateDim);
    for (int k = 0; k < kQuadBodyDim; ++k) {
      ASSERT_GE(s[k], ranges[k][0]);
      ASSERT_LE(s[k], ranges[k][1]);
    }
    ASSERT_EQ(env.ReferenceIndex(s), env.NearestWaypoint(s[0], s[2]));
  }
}

TEST(Quadrotor, EvaluationStartsAreFeasibleHovers) {
  const Quadrotor2D env;
  const auto starts = Quadrotor2D::EvaluationStarts();
  ASSERT_EQ(starts.size(), 4u);
  const std::vector<std::array<double, 2>> want = {{1, 1}, {-1, 1}, {0, 0.53}, {0, 1.47}};
  EXPECT_EQ(starts, want);
  for (const auto& [x, z] : starts) {
    const StateVec s = env.StaticStart(x, z);
    EXPECT_LE(env.Constraint(s), 0.0);
    EXPECT_EQ(s[1], 0.0);
    EXPECT_EQ(s[3], 0.0);
  }
  EXPECT_EQ(env.spec().max_episode_len, 360);
}

TEST(Quadrotor, WaypointCursorWraps) {
  WaypointCursor c(358, 360);
  c.Advance();
  EXPECT_EQ(c.index(), 359);
  c.Advance();
  EXPECT_EQ(c.index(), 0);
}

TEST(Quadrotor, ReferenceAdvancesOneWaypointPerStep) {
  const Quadrotor2D env;
  StateVec s = env.StaticStart(1.0, 1.0);
  int idx = env.ReferenceIndex(s);
  for (int t = 0; t < 400; ++t) {
    const Transition tr = env.Step(s, env.HoverAction());
    const int next = env.ReferenceIndex(tr.s_next);
    ASSERT_EQ(next, (idx + 1) % 360);
    idx = next;
    s = tr.s_next;
    s.head(kQuadBodyDim) = env.StaticStart(1.0, 1.0).head(kQuadBodyDim);
  }
}

TEST(Quadrotor, NearestWaypointOfAWaypointIsItself) {
  const Quadrotor2D env;
  for (int k = 0; k < 360; ++k) {
    const StateVec w = env.Waypoint(k);
    ASSERT_EQ(env.NearestWaypoint(w[0], w[kQuadZIndex]), k);
  }
}

}  // namespace
}  // namespace rcrl::envs
