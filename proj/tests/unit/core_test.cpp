#include <set>

#include <gtest/gtest.h>

#include "rcrl/core/environment.hpp"
#include "rcrl/core/errors.hpp"
#include "rcrl/core/rng.hpp"
#include "rcrl/core/version.hpp"
#include "rcrl/envs/double_integrator.hpp"
#include "rcrl/envs/quadrotor.hpp"
#include "rcrl/envs/registry.hpp"

namespace rcrl {
namespace {

TEST(CounterRng, SameSeedSameStream) {
  CounterRng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(CounterRng, SplitDoesNotAdvanceParent) {
  CounterRng a(7), b(7);
  (void)a.Split("child");
  (void)a.Split(3);
  EXPECT_EQ(a(), b());
}

TEST(CounterRng, SplitStreamsDiffer) {
  const CounterRng root(1);
  CounterRng x = root.Split("x"), y = root.Split("y"), x_again = root.Split("x");
  const std::uint64_t first = x();
  EXPECT_NE(first, y());
  EXPECT_EQ(first, x_again());
}

TEST(CounterRng, UniformInRange) {
  CounterRng r(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.Uniform(-2.0, 5.0);
    ASSERT_GE(u, -2.0);
    ASSERT_LT(u, 5.0);
  }
}

TEST(Version, NonEmpty) { EXPECT_FALSE(VersionString().empty()); }

class AllEnvs : public ::testing::TestWithParam<std::string> {
 protected:
  EnvPtr env = envs::MakeEnvironment(GetParam());

  StateVec RandomState(CounterRng& rng) const {
    StateVec s = env->Reset(rng);
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] *= rng.Uniform(0.5, 1.5);
    return env->Canonicalize(s);
  }
  ActionVec RandomAction(CounterRng& rng, double spread = 1.0) const {
    const EnvSpec& sp = env->spec();
    ActionVec a(sp.action_dim);
    for (int i = 0; i < sp.action_dim; ++i) {
      const double mid = 0.5 * (sp.action_low[i] + sp.action_high[i]);
      const double half = 0.5 * (sp.action_high[i] - sp.action_low[i]);
      a[i] = mid + spread * half * rng.Uniform(-1.0, 1.0);
    }
    return a;
  }
};

TEST_P(AllEnvs, SpecIsValid) { EXPECT_NO_THROW(env->spec().Validate()); }

TEST_P(AllEnvs, CostIndicatorMatchesConstraint) {
  CounterRng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Transition t = env->Step(RandomState(rng), RandomAction(rng));
    ASSERT_EQ(t.c == 1, t.h > 0.0);
    ASSERT_TRUE(std::isfinite(t.r));
    ASSERT_TRUE(std::isfinite(t.h));
  }
}

TEST_P(AllEnvs, StepIsPure) {
  CounterRng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const StateVec s = RandomState(rng);
    const ActionVec a = RandomAction(rng);
    const Transition t1 = env->Step(s, a), t2 = env->Step(s, a);
    ASSERT_EQ(t1.s_next, t2.s_next);
    ASSERT_EQ(t1.r, t2.r);
    ASSERT_EQ(t1.h, t2.h);
    ASSERT_EQ(t1.done, t2.done);
  }
}

TEST_P(AllEnvs, OutOfBoundsActionsAreClamped) {
  CounterRng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const StateVec s = RandomState(rng);
    const ActionVec a = RandomAction(rng, 3.0);
    const Transition t1 = env->Step(s, a), t2 = env->Step(s, env->Clamp(a));
    ASSERT_EQ(t1.s_next, t2.s_next);
    ASSERT_EQ(t1.r, t2.r);
    ASSERT_TRUE((t1.a.array() >= env->spec().action_low.array()).all());
    ASSERT_TRUE((t1.a.array() <= env->spec().action_high.array()).all());
  }
}

TEST_P(AllEnvs, ResetIsDeterministic) {
  CounterRng a(5), b(5);
  EXPECT_EQ(env->Reset(a), env->Reset(b));
}

TEST_P(AllEnvs, NonFiniteStateIsRejected) {
  StateVec s = env->Canonicalize(StateVec::Zero(env->spec().state_dim));
  s[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(env->Step(s, ActionVec::Zero(env->spec().action_dim)), IntegrationOverflow);
}

TEST_P(AllEnvs, WrongDimensionsAreRejected) {
  const StateVec s = env->Canonicalize(StateVec::Zero(env->spec().state_dim));
  EXPECT_THROW(env->Step(s, ActionVec::Zero(env->spec().action_dim + 1)), DimensionMismatch);
  EXPECT_THROW(env->Step(StateVec::Zero(env->spec().state_dim + 1),
                         ActionVec::Zero(env->spec().action_dim)),
               DimensionMismatch);
}

INSTANTIATE_TEST_SUITE_P(Registered, AllEnvs,
                         ::testing::Values("double_integrator", "quadrotor2d", "constant_h"));

TEST(DoubleIntegratorStep, IntegrationOverflow) {
  const envs::DoubleIntegrator env;
  StateVec s(2);
  s << 1e308, 1e308;
  EXPECT_THROW(env.Step(s, ActionVec::Zero(1)), IntegrationOverflow);
}

TEST(EnvSpec, ValidateRejectsBadBounds) {
  EnvSpec sp = envs::DoubleIntegrator().spec();
  sp.action_low[0] = 1.0;
  sp.action_high[0] = 1.0;
  EXPECT_THROW(sp.Validate(), ConfigError);
  sp = envs::DoubleIntegrator().spec();
  sp.dt = 0.0;
  EXPECT_THROW(sp.Validate(), ConfigError);
  sp = envs::DoubleIntegrator().spec();
  sp.max_episode_len = 0;
  EXPECT_THROW(sp.Validate(), ConfigError);
}

TEST(Registry, UnknownNamesAndKeys) {
  EXPECT_THROW(envs::MakeEnvironment("pendulum"), ConfigError);
  EXPECT_THROW(envs::MakeEnvironment("double_integrator", {{"mass", 1.0}}), ConfigError);
  EXPECT_THROW(envs::MakeEnvironment("quadrotor2d", {{"num_waypoints", 1.5}}), ConfigError);
  const auto env = envs::MakeEnvironment("double_integrator", {{"a_max", 1.0}});
  EXPECT_EQ(env->spec().action_high[0], 1.0);
  std::set<std::string> names;
  for (const auto& n : envs::RegisteredEnvironments()) names.insert(n);
  EXPECT_EQ(names.size(), 3u);
}

}  // namespace
}  // namespace rcrl
