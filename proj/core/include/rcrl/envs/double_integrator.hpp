#pragma once

#include "rcrl/core/environment.hpp"

namespace rcrl::envs {

struct DoubleIntegratorParams {
  double a_max = 0.5;
  /// Constraint is ||s||_inf <= bound.
  double bound = 5.0;
  double dt = 0.1;
  int max_episode_len = 100;
  /// Episodes end when ||s||_inf exceeds this.
  double exit_bound = 10.0;
};

/// h(s) = ||s||_inf - bound.
double DiConstraint(const StateVec& s, double bound = 5.0);

/// r(s, a) = -(||s||^2 + a^2).
double DiReward(const StateVec& s, const ActionVec& a);

/// s = [x1, x2], ds/dt = [x2, a], explicit Euler.
class DoubleIntegrator : public Environment {
 public:
  explicit DoubleIntegrator(DoubleIntegratorParams params = {});

  const EnvSpec& spec() const override { return spec_; }
  StateVec Reset(CounterRng& rng) const override;
  double Constraint(const StateVec& s) const override { return DiConstraint(s, params_.bound); }
  double Reward(const StateVec& s, const ActionVec& a) const override { return DiReward(s, a); }
  StateVec Propagate(const StateVec& s, const ActionVec& a) const override;
  bool OutOfBounds(const StateVec& s) const override;

  const DoubleIntegratorParams& params() const { return params_; }

 private:
  DoubleIntegratorParams params_;
  EnvSpec spec_;
};

struct ConstantConstraintParams {
  double h_value = -1.0;
  double dt = 0.1;
  int max_episode_len = 100;
};

/// Double-integrator dynamics with a constant constraint value. Used to
/// exercise the oracle on a trivially all-feasible (or all-infeasible) task.
class ConstantConstraint : public Environment {
 public:
  explicit ConstantConstraint(ConstantConstraintParams params = {});

  const EnvSpec& spec() const override { return spec_; }
  StateVec Reset(CounterRng& rng) const override;
  double Constraint(const StateVec&) const override { return params_.h_value; }
  double Reward(const StateVec& s, const ActionVec& a) const override { return DiReward(s, a); }
  StateVec Propagate(const StateVec& s, const ActionVec& a) const override;
  bool OutOfBounds(const StateVec& s) const override;

 private:
  ConstantConstraintParams params_;
  EnvSpec spec_;
};

}  // namespace rcrl::envs
