#include "gradient_check.hpp"

#include <cmath>
#include <vector>

#include "rcrl/envs/double_integrator.hpp"
#include "reference.hpp"

namespace rcrl::testing {

using Eigen::VectorXd;

std::string ToString(UpdateOp op) {
  switch (op) {
    case UpdateOp::kCritic: return "critic";
    case UpdateOp::kSafetyCritic: return "safety critic";
    case UpdateOp::kActor: return "actor";
    case UpdateOp::kMultiplier: return "multiplier";
  }
  return "?";
}

namespace {

constraints::ConstraintKind PickKind(UpdateOp op, CounterRng& rng) {
  std::vector<constraints::ConstraintKind> kinds = {
      constraints::Reachability{}, constraints::CumulativeCost{}, constraints::Cbf{},
      constraints::SafetyIndex{}};
  if (op != UpdateOp::kMultiplier) kinds.push_back(constraints::RewardShaping{});
  return kinds[rng() % kinds.size()];
}

}  // namespace

GradientTrial RunGradientTrial(UpdateOp op, std::uint64_t seed) {
  CounterRng rng(seed);
  const envs::DoubleIntegrator env;

  rac::TrainerConfig cfg;
  cfg.constraint = PickKind(op, rng);
  cfg.hidden_width = 8 + static_cast<int>(rng() % 9);
  cfg.hidden_layers = 2;
  cfg.reward_scale = 0.05;
  rac::Learner learner(env.spec(), cfg, rng.Split("learner"));

  // Targets and the multiplier away from their initial values.
  CounterRng perturb = rng.Split("perturb");
  learner.q_target.InitHeUniform(perturb);
  learner.qh_target.InitHeUniform(perturb);
  for (Eigen::Index i = 0; i < learner.lambda.params().size(); ++i) {
    learner.lambda.params()[i] += perturb.Uniform(-0.3, 0.3);
  }

  const int n = 4 + static_cast<int>(rng() % 9);
  std::vector<Transition> ts;
  for (int j = 0; j < n; ++j) {
    StateVec s(2);
    s << rng.Uniform(-7.0, 7.0), rng.Uniform(-7.0, 7.0);
    ActionVec a(1);
    a << rng.Uniform(-0.5, 0.5);
    Transition t = env.Step(s, a);
    if (j % 3 == 0) t.done = EpisodeEnd::kBoundaryExit;
    ts.push_back(t);
  }
  const rac::Batch b = rac::MakeBatch(ts, cfg.constraint, env.spec().dt);
  const ReferenceLosses ref(learner);

  GradientTrial out;
  out.width = cfg.hidden_width;
  out.algorithm = constraints::AlgorithmName(cfg.constraint);
  rac::GradResult g;
  std::function<double(const VectorXd&)> f;
  VectorXd x;
  switch (op) {
    case UpdateOp::kCritic: {
      const VectorXd y = learner.CriticTarget(b);
      g = learner.CriticGrad(b);
      f = [&, y](const VectorXd& w) { return ref.Critic(w, b, y); };
      x = learner.q.params();
      break;
    }
    case UpdateOp::kSafetyCritic: {
      const VectorXd y = learner.SafetyCriticTarget(b);
      g = learner.SafetyCriticGrad(b);
      f = [&, y](const VectorXd& p) { return ref.SafetyCritic(p, b, y); };
      x = learner.qh.params();
      break;
    }
    case UpdateOp::kActor:
      g = learner.ActorGrad(b);
      f = [&](const VectorXd& p) { return ref.Actor(p, b); };
      x = learner.actor.params();
      break;
    case UpdateOp::kMultiplier:
      g = learner.MultiplierGrad(b);
      f = [&](const VectorXd& p) { return ref.Multiplier(p, b); };
      x = learner.lambda.params();
      break;
  }
  out.loss_gap = std::abs(g.loss - f(x));
  out.relative_error = RelativeError(g.grad, CentralDifference(f, x, 1e-5));
  return out;
}

}  // namespace rcrl::testing
