#pragma once

#include <array>
#include <cstdint>

#include "rcrl/approx/optim.hpp"
#include "rcrl/constraints/constraint.hpp"

namespace rcrl::rac {

struct TrainerConfig {
  constraints::ConstraintKind constraint = constraints::Reachability{};

  std::int64_t total_steps = 200000;
  std::int64_t eval_interval = 5000;
  int eval_episodes = 10;
  /// Uniform random actions before this many steps.
  std::int64_t warmup_steps = 5000;
  /// No gradient updates before this many steps.
  std::int64_t update_after = 1000;
  /// 0 = only the initial and final checkpoints.
  std::int64_t checkpoint_interval = 0;

  int batch_size = 512;
  std::int64_t buffer_capacity = 50000;
  double gamma = 0.99;
  double tau = 0.005;
  int actor_interval = 4;
  int multiplier_interval = 12;

  int hidden_width = 256;
  int hidden_layers = 2;

  approx::LinearSchedule critic_lr{1e-4, 1e-6, 0};
  approx::LinearSchedule actor_lr{2e-5, 5e-7, 0};
  approx::LinearSchedule multiplier_lr{6e-7, 1e-7, 0};
  double adam_beta1 = 0.99;
  double adam_beta2 = 0.999;
  double clip_norm = 10.0;
  double lambda_max = 100.0;
  /// Initial multiplier value (sets the softplus head's output bias).
  double lambda_init = 0.693147180559945;

  /// Gaussian action noise, as a fraction of the half action range.
  double exploration_start = 0.1;
  double exploration_end = 0.01;
  /// Rewards are multiplied by this before entering the critic.
  double reward_scale = 1.0;

  int probe_count = 1000;
  /// Nodes per axis of the oracle grid used to classify probes and pick
  /// evaluation starts (2-D environments only).
  int probe_grid = 101;
  /// Deep-feasible probes lie at least this many cells inside the kernel.
  int probe_margin_cells = 2;

  /// Run the environment on a separate thread feeding a bounded queue.
  bool threaded_rollout = false;
  int queue_capacity = 64;
  /// Transition k is collected with the actor as it was after update
  /// k - policy_lag. Identical in both rollout modes.
  int policy_lag = 0;

  /// Anneal length of every schedule whose `steps` is 0.
  std::int64_t AnnealSteps() const { return total_steps > 0 ? total_steps : 1; }
  approx::LinearSchedule Resolved(approx::LinearSchedule s) const;

  /// {critic, actor, multiplier} learning rates at global step k.
  std::array<double, 3> LearningRates(std::int64_t k) const;

  /// Throws ConfigError naming the offending field. Checks the learning-rate
  /// ordering critic > actor > multiplier at every breakpoint of the
  /// piecewise-linear schedules, which covers every step.
  void Validate() const;

  bool operator==(const TrainerConfig&) const = default;
};

}  // namespace rcrl::rac
