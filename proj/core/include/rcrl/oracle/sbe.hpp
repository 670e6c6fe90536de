#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rcrl/core/environment.hpp"
#include "rcrl/oracle/grid.hpp"

namespace rcrl::oracle {

using Policy = std::function<ActionVec(const StateVec&)>;
using StateFunction = std::function<double(const StateVec&)>;

struct OracleConfig {
  double gamma = 0.99;
  /// Evenly spaced samples per action axis for the min over actions.
  int action_samples = 21;
  /// Sup-norm change between sweeps at which iteration stops.
  double tolerance = 1e-6;
  int max_sweeps = 20000;
  /// Nodes added on every side of the requested grid. Successors that leave
  /// the padded domain are valued at h(s').
  int pad_cells = 40;

  void Validate() const;
};

/// Successor of one (cell, action): either an interpolation stencil into the
/// working grid or a fixed exterior value.
struct Successor {
  std::int64_t base = -1;  // lower corner; negative means exterior
  std::array<double, 3> frac{};
  double exterior = 0.0;
};

/// Precomputed successors for every (cell, action) pair on a grid.
class TransitionTable {
 public:
  TransitionTable(GridSpec grid, int num_actions, std::vector<Successor> successors);

  /// One env step per (node, action). `exterior` values successors that fall
  /// outside `grid`.
  static TransitionTable Build(const Environment& env, const GridSpec& grid,
                               std::span<const ActionVec> actions, const StateFunction& exterior);
  /// One env step per node under `policy`.
  static TransitionTable BuildForPolicy(const Environment& env, const GridSpec& grid,
                                        const Policy& policy, const StateFunction& exterior);

  const GridSpec& grid() const { return grid_; }
  int num_actions() const { return num_actions_; }
  const Successor& at(std::size_t cell, int action) const {
    return successors_[cell * num_actions_ + action];
  }

  /// Value of the successor under `values` (defined on grid()).
  double Lookup(const Successor& s, std::span<const double> values) const;

  /// Stencil (or exterior marker) for an arbitrary point.
  Successor Locate(const StateVec& x, double exterior_value) const;

 private:
  GridSpec grid_;
  int num_actions_;
  std::vector<Successor> successors_;
};

/// B[Q](i) = (1 - gamma) h_i + gamma max{h_i, min_a Q(succ(i, a))}.
/// With one action per cell this is the single-policy operator.
std::vector<double> ApplySafetyOperator(const TransitionTable& table, std::span<const double> h,
                                        double gamma, std::span<const double> q);

/// ||B Q - B Qhat||_inf / ||Q - Qhat||_inf; 0 when Q == Qhat.
double ContractionRatio(const TransitionTable& table, std::span<const double> h, double gamma,
                        std::span<const double> q, std::span<const double> q_hat);

struct SafetyValueSolution {
  /// Values on the requested grid.
  ValueGrid value;
  /// Values on the padded working grid (superset of `value`).
  ValueGrid working;
  int sweeps = 0;
  double residual = 0.0;
  std::vector<double> residual_history;

  KernelMask Kernel() const { return KernelMask::FromValues(value); }
};

/// Optimal safety value by synchronous value iteration on the discounted
/// safety Bellman equation.
SafetyValueSolution SolveSbe(const Environment& env, const GridSpec& grid, const OracleConfig& cfg);

/// Safety value of a fixed deterministic policy. When `constraint` is given
/// it replaces env.Constraint() everywhere (used to measure persistence of a
/// learned constraint function).
SafetyValueSolution EvaluatePolicySafety(const Environment& env, const Policy& policy,
                                         const GridSpec& grid, const OracleConfig& cfg,
                                         const StateFunction& constraint = {});

/// The sampled action grid used for the min over actions.
std::vector<ActionVec> SampleActions(const EnvSpec& spec, int samples_per_axis);

/// Picks the sampled action minimising the solved safety value of s'.
/// Ties go to the first action in sampling order.
class GreedySafetyPolicy {
 public:
  GreedySafetyPolicy(const Environment& env, SafetyValueSolution solution, const OracleConfig& cfg);
  ActionVec operator()(const StateVec& s) const;

 private:
  const Environment* env_;
  SafetyValueSolution solution_;
  std::vector<ActionVec> actions_;
  TransitionTable locator_;
};

/// Maximal-braking viability kernel of the double integrator (continuous time).
KernelMask AnalyticKernel(const GridSpec& grid, double a_max = 0.5, double bound = 5.0);

/// Max contraction ratio of the safety operator over random problems and
/// random (Q, Qhat) pairs.
double ContractionCheck(const OracleConfig& cfg, int trials, CounterRng& rng);

}  // namespace rcrl::oracle
