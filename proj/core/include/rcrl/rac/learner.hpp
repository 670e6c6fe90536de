#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "rcrl/approx/checkpoint.hpp"
#include "rcrl/approx/mlp.hpp"
#include "rcrl/approx/optim.hpp"
#include "rcrl/rac/config.hpp"
#include "rcrl/rac/replay_buffer.hpp"

namespace rcrl::rac {

/// Column-per-sample view of a sampled minibatch.
struct Batch {
  Eigen::MatrixXd s, a, s_next;
  Eigen::VectorXd r;         // raw environment reward
  Eigen::VectorXd h, h_next;
  Eigen::VectorXd c;
  Eigen::VectorXd terminal;  // 1 for boundary exits
  Eigen::VectorXd cval;      // transition-level constraint value (CBF / SI)

  int size() const { return static_cast<int>(s.cols()); }
};

Batch MakeBatch(const ReplayBuffer& buffer, const std::vector<std::size_t>& indices,
                const constraints::ConstraintKind& kind, double dt);
Batch MakeBatch(const std::vector<Transition>& transitions,
                const constraints::ConstraintKind& kind, double dt);

struct GradResult {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

/// Loss values reported by one Update() call (NaN when a term was skipped).
struct UpdateStats {
  double q_loss = 0.0;
  double qh_loss = 0.0;
  double actor_loss = 0.0;
  bool actor_updated = false;
  bool multiplier_updated = false;
};

/// Networks and optimiser state of the actor-critic, plus the four gradient
/// estimators. The "safety critic" slot holds whichever learned constraint
/// function F(s, a) the constraint kind calls for:
///   reachability    Q_h with the discounted safety target
///   cumulative cost Q_c with a TD target on c
///   CBF / SI        regression onto the transition's constraint value
///   reward shaping  Q_h, trained for diagnostics only
class Learner {
 public:
  Learner(const EnvSpec& spec, const TrainerConfig& config, CounterRng rng);

  const EnvSpec& spec() const { return spec_; }
  const TrainerConfig& config() const { return config_; }
  const constraints::ConstraintKind& kind() const { return config_.constraint; }
  constraints::MultiplierShape multiplier_shape() const { return multiplier_shape_; }

  approx::Mlp actor, q, q_target, qh, qh_target, lambda;

  // Input encoding shared by every network.
  Eigen::MatrixXd EncodeState(const Eigen::MatrixXd& s) const;
  Eigen::MatrixXd EncodeAction(const Eigen::MatrixXd& a) const;
  Eigen::MatrixXd CriticInput(const Eigen::MatrixXd& s, const Eigen::MatrixXd& a) const;
  Eigen::MatrixXd MultiplierInput(const Eigen::MatrixXd& s) const;

  /// Deterministic policy, one action per column.
  Eigen::MatrixXd Act(const Eigen::MatrixXd& s) const;
  ActionVec Act(const StateVec& s) const;
  /// Softplus output clamped to lambda_max; zeros when the kind has no
  /// multiplier.
  Eigen::VectorXd Lambda(const Eigen::MatrixXd& s) const;
  /// F(s, pi(s)) minus the kind's threshold: <= 0 means predicted satisfied.
  Eigen::VectorXd ConstraintAtPolicy(const Eigen::MatrixXd& s) const;
  double ConstraintAtPolicy(const StateVec& s) const;

  /// Regression targets of the two critics (held constant in the gradients).
  Eigen::VectorXd CriticTarget(const Batch& b) const;
  Eigen::VectorXd SafetyCriticTarget(const Batch& b) const;

  /// Mean over the batch of 1/2 (Q(s,a) - y)^2, gradient in q's parameters.
  GradResult CriticGrad(const Batch& b) const;
  /// Same for the constraint critic.
  GradResult SafetyCriticGrad(const Batch& b) const;
  /// Objective mean[-Q(s, pi(s)) + lambda(s) F(s, pi(s))], gradient in the
  /// actor's parameters (descent direction). lambda is held fixed.
  GradResult ActorGrad(const Batch& b) const;
  /// Ascent direction mean[F(s, pi(s)) grad lambda(s)]; `loss` is the
  /// Lagrangian term mean[lambda F]. At the lambda_max clamp a sample only
  /// contributes if it pushes lambda back down.
  GradResult MultiplierGrad(const Batch& b) const;

  /// One learner step at global step k: critics, targets, and on their
  /// cadence the actor and the multiplier.
  UpdateStats Update(const Batch& b, std::int64_t k);

  std::vector<approx::NamedNetwork> Networks() const;
  /// Loads parameters by name; shapes must match.
  void LoadNetworks(const std::vector<approx::NamedNetwork>& nets);

 private:
  Eigen::VectorXd CriticTarget(const Batch& b, const Eigen::MatrixXd& a_next) const;
  Eigen::VectorXd SafetyCriticTarget(const Batch& b, const Eigen::MatrixXd& a_next) const;
  GradResult RegressionGrad(const approx::Mlp& net, const Batch& b,
                            const Eigen::VectorXd& target) const;
  Eigen::VectorXd ShapedReward(const Batch& b) const;

  EnvSpec spec_;
  TrainerConfig config_;
  constraints::MultiplierShape multiplier_shape_;
  Eigen::VectorXd action_mid_, action_half_;
  approx::AdamState adam_q_, adam_qh_, adam_actor_, adam_lambda_;
  approx::ProjectionSpec proj_;
};

}  // namespace rcrl::rac
