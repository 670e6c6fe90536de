#include "rcrl/envs/double_integrator.hpp"

#include "rcrl/core/errors.hpp"

namespace rcrl::envs {

double DiConstraint(const StateVec& s, double bound) {
  if (s.size() != 2) throw DimensionMismatch("double integrator state must have length 2");
  return s.cwiseAbs().maxCoeff() - bound;
}

double DiReward(const StateVec& s, const ActionVec& a) {
  if (s.size() != 2 || a.size() != 1) {
    throw DimensionMismatch("double integrator expects |s| = 2, |a| = 1");
  }
  return -(s.squaredNorm() + a.squaredNorm());
}

namespace {

StateVec EulerStep(const StateVec& s, double a, double dt) {
  StateVec next(2);
  next[0] = s[0] + dt * s[1];
  next[1] = s[1] + dt * a;
  return next;
}

EnvSpec MakeSpec(const std::string& name, double a_max, double dt, int max_len, double scale,
                 double exit_bound) {
  EnvSpec sp;
  sp.name = name;
  sp.state_dim = 2;
  sp.action_dim = 1;
  sp.action_low = ActionVec::Constant(1, -a_max);
  sp.action_high = ActionVec::Constant(1, a_max);
  sp.dt = dt;
  sp.max_episode_len = max_len;
  sp.state_scale = StateVec::Constant(2, scale);
  sp.termination = "step count reaches max_episode_len, or ||s||_inf > " + std::to_string(exit_bound);
  sp.Validate();
  return sp;
}

}  // namespace

DoubleIntegrator::DoubleIntegrator(DoubleIntegratorParams params) : params_(params) {
  if (!(params_.a_max > 0.0)) throw ConfigError("env.a_max", "must be > 0");
  if (!(params_.bound > 0.0)) throw ConfigError("env.bound", "must be > 0");
  if (!(params_.exit_bound >= params_.bound)) {
    throw ConfigError("env.exit_bound", "must be >= bound");
  }
  spec_ = MakeSpec("double_integrator", params_.a_max, params_.dt, params_.max_episode_len,
                   params_.bound, params_.exit_bound);
}

StateVec DoubleIntegrator::Reset(CounterRng& rng) const {
  StateVec s(2);
  s[0] = rng.Uniform(-params_.bound, params_.bound);
  s[1] = rng.Uniform(-params_.bound, params_.bound);
  return s;
}

StateVec DoubleIntegrator::Propagate(const StateVec& s, const ActionVec& a) const {
  return EulerStep(s, a[0], params_.dt);
}

bool DoubleIntegrator::OutOfBounds(const StateVec& s) const {
  return s.cwiseAbs().maxCoeff() > params_.exit_bound;
}

ConstantConstraint::ConstantConstraint(ConstantConstraintParams params) : params_(params) {
  spec_ = MakeSpec("constant_h", 0.5, params_.dt, params_.max_episode_len, 5.0, 10.0);
}

StateVec ConstantConstraint::Reset(CounterRng& rng) const {
  StateVec s(2);
  s[0] = rng.Uniform(-5.0, 5.0);
  s[1] = rng.Uniform(-5.0, 5.0);
  return s;
}

StateVec ConstantConstraint::Propagate(const StateVec& s, const ActionVec& a) const {
  return EulerStep(s, a[0], params_.dt);
}

bool ConstantConstraint::OutOfBounds(const StateVec& s) const {
  return s.cwiseAbs().maxCoeff() > 10.0;
}

}  // namespace rcrl::envs
