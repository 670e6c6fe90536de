#include "rcrl/rac/config.hpp"

#include <set>

#include "rcrl/core/errors.hpp"

namespace rcrl::rac {

approx::LinearSchedule TrainerConfig::Resolved(approx::LinearSchedule s) const {
  if (s.steps == 0) s.steps = AnnealSteps();
  return s;
}

std::array<double, 3> TrainerConfig::LearningRates(std::int64_t k) const {
  return {Resolved(critic_lr).at(k), Resolved(actor_lr).at(k), Resolved(multiplier_lr).at(k)};
}

void TrainerConfig::Validate() const {
  constraints::Validate(constraint);
  if (total_steps < 0) throw ConfigError("train.total_steps", "must be >= 0");
  if (eval_interval < 1) throw ConfigError("train.eval_interval", "must be >= 1");
  if (eval_episodes < 1) throw ConfigError("train.eval_episodes", "must be >= 1");
  if (warmup_steps < 0) throw ConfigError("train.warmup_steps", "must be >= 0");
  if (update_after < 0) throw ConfigError("train.update_after", "must be >= 0");
  if (checkpoint_interval < 0) throw ConfigError("train.checkpoint_interval", "must be >= 0");
  if (batch_size < 1) throw ConfigError("train.batch_size", "must be >= 1");
  if (buffer_capacity < batch_size) {
    throw ConfigError("train.buffer_capacity", "must be >= batch_size");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("train.gamma", "must lie in (0, 1)");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("train.tau", "must lie in [0, 1]");
  if (actor_interval < 1) throw ConfigError("train.actor_interval", "must be >= 1");
  if (multiplier_interval < 1) throw ConfigError("train.multiplier_interval", "must be >= 1");
  if (hidden_width < 1) throw ConfigError("network.hidden_width", "must be >= 1");
  if (hidden_layers < 1) throw ConfigError("network.hidden_layers", "must be >= 1");
  Resolved(critic_lr).Validate("optim.critic_lr");
  Resolved(actor_lr).Validate("optim.actor_lr");
  Resolved(multiplier_lr).Validate("optim.multiplier_lr");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) {
    throw ConfigError("optim.adam_beta1", "must lie in [0, 1)");
  }
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("optim.adam_beta2", "must lie in [0, 1)");
  }
  if (!(clip_norm > 0.0)) throw ConfigError("optim.clip_norm", "must be > 0");
  if (!(lambda_max > 0.0)) throw ConfigError("optim.lambda_max", "must be > 0");
  if (!(lambda_init > 0.0 && lambda_init < lambda_max)) {
    throw ConfigError("optim.lambda_init", "must lie in (0, lambda_max)");
  }
  if (!(exploration_start >= 0.0)) throw ConfigError("train.exploration_start", "must be >= 0");
  if (!(exploration_end >= 0.0)) throw ConfigError("train.exploration_end", "must be >= 0");
  if (!(reward_scale > 0.0)) throw ConfigError("train.reward_scale", "must be > 0");
  if (probe_count < 1) throw ConfigError("train.probe_count", "must be >= 1");
  if (probe_grid < 3) throw ConfigError("train.probe_grid", "must be >= 3");
  if (probe_margin_cells < 0) throw ConfigError("train.probe_margin_cells", "must be >= 0");
  if (queue_capacity < 1) throw ConfigError("train.queue_capacity", "must be >= 1");
  if (policy_lag < 0) throw ConfigError("train.policy_lag", "must be >= 0");

  std::set<std::int64_t> breakpoints = {0, Resolved(critic_lr).steps, Resolved(actor_lr).steps,
                                        Resolved(multiplier_lr).steps};
  for (std::int64_t k : breakpoints) {
    const auto lr = LearningRates(k);
    if (!(lr[0] > lr[1])) {
      throw ConfigError("optim.actor_lr", "critic learning rate must exceed actor learning rate at "
                                          "every step (violated at step " + std::to_string(k) + ")");
    }
    if (!(lr[1] > lr[2])) {
      throw ConfigError("optim.multiplier_lr",
                        "actor learning rate must exceed multiplier learning rate at every step "
                        "(violated at step " + std::to_string(k) + ")");
    }
  }
}

}  // namespace rcrl::rac
