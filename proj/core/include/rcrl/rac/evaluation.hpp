#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "rcrl/core/environment.hpp"
#include "rcrl/oracle/grid.hpp"
#include "rcrl/oracle/sbe.hpp"
#include "rcrl/rac/learner.hpp"

namespace rcrl::rac {

/// Box [-state_scale, state_scale] of a 2-D environment with n nodes per axis.
oracle::GridSpec DefaultGrid(const EnvSpec& spec, int n);

/// Oracle configuration for a grid of n nodes per axis: the padding keeps
/// the same physical margin as 40 cells on a 201-node grid.
oracle::OracleConfig DefaultOracleConfig(int n, double gamma);

/// Point i of the Halton sequence in [0, 1)^dims (bases 2, 3, 5, ...).
Eigen::VectorXd Halton(std::size_t index, int dims);

/// Fixed probe states for the multiplier diagnostics, one column each.
struct ProbeSet {
  Eigen::MatrixXd feasible;
  Eigen::MatrixXd infeasible;
};

/// With a kernel: Halton points over the kernel's box, feasible if the
/// nearest node lies at least `margin` cells inside the kernel, infeasible if
/// it lies outside. Without one: states from env.Reset classified by h.
ProbeSet MakeProbeSet(const Environment& env, const oracle::KernelMask* kernel, int count,
                      int margin, CounterRng rng);

struct EpisodeStats {
  double ret = 0.0;
  /// sum_t c(s_t) / T over the full horizon T; an early boundary exit keeps
  /// charging c(s_exit) for the remaining steps.
  double violation_rate = 0.0;
  /// Some visited state (including the last) had h > 0.
  bool any_violation = false;
  int length = 0;
};

EpisodeStats RunEpisode(const Environment& env, const oracle::Policy& policy, StateVec s0);

struct EvalSummary {
  double avg_return = 0.0;
  double violation_rate = 0.0;
  /// Fraction of episodes with any violation.
  double violating_episodes = 0.0;
  int episodes = 0;
};

EvalSummary Evaluate(const Environment& env, const oracle::Policy& policy,
                     const std::vector<StateVec>& starts);

/// Evaluation starts: the four fixed hover starts for the quadrotor; for a
/// 2-D env with a kernel, `n` nodes drawn uniformly from the kernel eroded by
/// `margin` cells; otherwise `n` draws from env.Reset.
std::vector<StateVec> EvaluationStarts(const Environment& env, const oracle::KernelMask* kernel,
                                       int n, int margin, CounterRng rng);

/// A 2-D slice through state space. Every coordinate not on `axes` is taken
/// from `base`; the env's Canonicalize then fills dependent coordinates.
struct SliceSpec {
  std::vector<int> axes;
  std::vector<oracle::Axis> ranges;
  StateVec base;

  /// Throws ConfigError unless there are exactly two distinct, valid axes.
  void Validate(int state_dim) const;
  oracle::GridSpec Grid() const;
  StateVec StateAt(const Environment& env, const Eigen::VectorXd& point) const;
};

/// F(s, pi(s)) on the slice grid; the sub-zero set is the learned feasible
/// set.
oracle::ValueGrid ExportSlice(const Learner& learner, const Environment& env,
                              const SliceSpec& slice);

/// The full-state slice of a 2-D environment over `grid`.
SliceSpec FullSlice(const oracle::GridSpec& grid, int state_dim);

/// Quadrotor xz-slices with xdot = theta = thetadot = 0 over
/// x in [-1.5, 1.5], z in [0.5, 1.5], one per requested zdot.
std::vector<SliceSpec> QuadrotorSlices(const std::vector<double>& zdots, int n);

/// Sub-zero set of F(s, pi(s)) on a 2-D grid.
oracle::KernelMask LearnedFeasibleMask(const Learner& learner, const Environment& env,
                                       const oracle::GridSpec& grid);

/// States from which the learned policy keeps max{h, F(., pi(.))} <= 0 at
/// every future step: the sub-zero set of the policy's safety value under
/// that constraint.
oracle::KernelMask PersistentFeasibleMask(const Learner& learner, const Environment& env,
                                          const oracle::GridSpec& grid,
                                          const oracle::OracleConfig& cfg);

}  // namespace rcrl::rac
