#include "rcrl/core/environment.hpp"

#include <cmath>

#include "rcrl/core/errors.hpp"

namespace rcrl {

void EnvSpec::Validate() const {
  if (state_dim <= 0) throw ConfigError("env.state_dim", "must be positive");
  if (action_dim <= 0) throw ConfigError("env.action_dim", "must be positive");
  if (action_low.size() != action_dim || action_high.size() != action_dim) {
    throw ConfigError("env.action_bounds", "length must equal action_dim");
  }
  if ((action_low.array() >= action_high.array()).any()) {
    throw ConfigError("env.action_bounds", "low must be < high elementwise");
  }
  if (!(dt > 0.0)) throw ConfigError("env.dt", "must be > 0");
  if (max_episode_len <= 0) throw ConfigError("env.max_episode_len", "must be > 0");
  if (state_scale.size() != state_dim || (state_scale.array() <= 0.0).any()) {
    throw ConfigError("env.state_scale", "must be positive with length state_dim");
  }
}

ActionVec Environment::Clamp(const ActionVec& a) const {
  const EnvSpec& sp = spec();
  if (a.size() != sp.action_dim) {
    throw DimensionMismatch("action has length " + std::to_string(a.size()) + ", expected " +
                            std::to_string(sp.action_dim));
  }
  return a.cwiseMax(sp.action_low).cwiseMin(sp.action_high);
}

Transition Environment::Step(const StateVec& s, const ActionVec& a) const {
  const EnvSpec& sp = spec();
  if (s.size() != sp.state_dim) {
    throw DimensionMismatch("state has length " + std::to_string(s.size()) + ", expected " +
                            std::to_string(sp.state_dim));
  }
  if (!s.allFinite()) throw IntegrationOverflow(sp.name + ": non-finite input state");

  Transition tr;
  tr.s = s;
  tr.a = Clamp(a);
  tr.s_next = Propagate(s, tr.a);
  if (!tr.s_next.allFinite()) throw IntegrationOverflow(sp.name + ": non-finite state after step");
  tr.r = Reward(s, tr.a);
  tr.h = Constraint(s);
  tr.h_next = Constraint(tr.s_next);
  if (!std::isfinite(tr.r) || !std::isfinite(tr.h)) {
    throw IntegrationOverflow(sp.name + ": non-finite reward or constraint");
  }
  tr.c = Cost(tr.h);
  tr.done = OutOfBounds(tr.s_next) ? EpisodeEnd::kBoundaryExit : EpisodeEnd::kRunning;
  return tr;
}

}  // namespace rcrl
