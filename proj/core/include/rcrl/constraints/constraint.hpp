#pragma once

#include <functional>
#include <string>
#include <variant>

#include "rcrl/core/environment.hpp"

namespace rcrl::constraints {

/// Statewise reachability constraint Q_h(s, pi(s)) <= 0.
struct Reachability {
  bool operator==(const Reachability&) const = default;
};

/// Expected discounted cost Q_c(s, pi(s)) <= threshold.
struct CumulativeCost {
  double threshold = 0.1;
  bool operator==(const CumulativeCost&) const = default;
};

/// Control barrier function B(s) = hdot(s) + mu h(s) <= 0.
struct Cbf {
  double mu = 0.1;
  bool operator==(const Cbf&) const = default;
};

/// Safety index phi(s) = sigma - (-h)^n + k hdot, constraint
/// phi(s') - max{phi(s) - eta_d, 0} <= 0.
struct SafetyIndex {
  double sigma = 0.1;
  double n = 2.0;
  double k = 1.0;
  double eta_d = 0.1;
  bool operator==(const SafetyIndex&) const = default;
};

/// No constraint; the reward is penalised by rho h(s).
struct RewardShaping {
  double rho = 0.5;
  bool operator==(const RewardShaping&) const = default;
};

using ConstraintKind = std::variant<Reachability, CumulativeCost, Cbf, SafetyIndex, RewardShaping>;

enum class MultiplierShape { kStatewise, kScalar, kNone };

/// Throws ConfigError naming the offending hyperparameter.
void Validate(const ConstraintKind& kind);

/// Algorithm name used in configs: rcrl, lagrangian, cbf, si, reward-shaping.
std::string AlgorithmName(const ConstraintKind& kind);
ConstraintKind DefaultForAlgorithm(const std::string& name);

MultiplierShape multiplier_shape(const ConstraintKind& kind);

/// Whether constraint_value needs a learned critic evaluated at (s, pi(s)).
bool NeedsCritic(const ConstraintKind& kind);

/// Finite-difference hdot = (h' - h) / dt.
double HDot(double h, double h_next, double dt);

/// sigma - (-h)^n + k hdot. Non-integer n uses the signed power so that
/// h > 0 stays well defined.
double SafetyIndexPhi(const SafetyIndex& si, double h, double hdot);

/// phi' - max{phi - eta_d, 0}.
double SafetyIndexCondition(double phi, double phi_next, double eta_d);

/// Learned critic evaluated at (s, pi(s)).
using CriticAtPolicy = std::function<double(const StateVec&)>;

/// Scalar whose sign decides satisfaction (<= 0) under `kind`. The CBF and
/// SI forms use only (h, h_next, dt); the learned forms call `critic`.
/// Throws std::invalid_argument when a learned form has no critic.
double constraint_value(const ConstraintKind& kind, const Transition& t, double dt,
                        const CriticAtPolicy& critic = {});

/// r - rho h. Throws std::invalid_argument for any kind but RewardShaping.
double shape_reward(const ConstraintKind& kind, double r, double h);

}  // namespace rcrl::constraints
