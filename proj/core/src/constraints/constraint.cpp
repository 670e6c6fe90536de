#include "rcrl/constraints/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcrl/core/errors.hpp"

namespace rcrl::constraints {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void Validate(const ConstraintKind& kind) {
  std::visit(Overloaded{
                 [](const Reachability&) {},
                 [](const CumulativeCost& c) {
                   if (!(c.threshold >= 0.0)) {
                     throw ConfigError("constraint.threshold", "must be >= 0");
                   }
                 },
                 [](const Cbf& c) {
                   if (!(c.mu > 0.0 && c.mu < 1.0)) {
                     throw ConfigError("constraint.mu", "must lie in (0, 1)");
                   }
                 },
                 [](const SafetyIndex& c) {
                   if (!(c.n >= 1.0)) throw ConfigError("constraint.n", "must be >= 1");
                   if (!(c.k > 0.0)) throw ConfigError("constraint.k", "must be > 0");
                   if (!(c.eta_d >= 0.0)) throw ConfigError("constraint.eta_d", "must be >= 0");
                   if (!std::isfinite(c.sigma)) {
                     throw ConfigError("constraint.sigma", "must be finite");
                   }
                 },
                 [](const RewardShaping& c) {
                   if (!(c.rho > 0.0)) throw ConfigError("constraint.rho", "must be > 0");
                 },
             },
             kind);
}

std::string AlgorithmName(const ConstraintKind& kind) {
  return std::visit(Overloaded{
                        [](const Reachability&) { return std::string("rcrl"); },
                        [](const CumulativeCost&) { return std::string("lagrangian"); },
                        [](const Cbf&) { return std::string("cbf"); },
                        [](const SafetyIndex&) { return std::string("si"); },
                        [](const RewardShaping&) { return std::string("reward-shaping"); },
                    },
                    kind);
}

ConstraintKind DefaultForAlgorithm(const std::string& name) {
  if (name == "rcrl") return Reachability{};
  if (name == "lagrangian") return CumulativeCost{};
  if (name == "cbf") return Cbf{};
  if (name == "si") return SafetyIndex{};
  if (name == "reward-shaping") return RewardShaping{};
  throw ConfigError("algorithm.kind",
                    "unknown algorithm '" + name +
                        "' (expected rcrl, lagrangian, cbf, si or reward-shaping)");
}

MultiplierShape multiplier_shape(const ConstraintKind& kind) {
  if (std::holds_alternative<CumulativeCost>(kind)) return MultiplierShape::kScalar;
  if (std::holds_alternative<RewardShaping>(kind)) return MultiplierShape::kNone;
  return MultiplierShape::kStatewise;
}

bool NeedsCritic(const ConstraintKind& kind) {
  return std::holds_alternative<Reachability>(kind) || std::holds_alternative<CumulativeCost>(kind);
}

double HDot(double h, double h_next, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("hdot needs dt > 0");
  return (h_next - h) / dt;
}

double SafetyIndexPhi(const SafetyIndex& si, double h, double hdot) {
  const double base = -h;
  double p;
  if (si.n == std::round(si.n)) {
    p = std::pow(base, si.n);
  } else {
    p = std::copysign(std::pow(std::abs(base), si.n), base);
  }
  return si.sigma - p + si.k * hdot;
}

double SafetyIndexCondition(double phi, double phi_next, double eta_d) {
  return phi_next - std::max(phi - eta_d, 0.0);
}

double constraint_value(const ConstraintKind& kind, const Transition& t, double dt,
                        const CriticAtPolicy& critic) {
  return std::visit(
      Overloaded{
          [&](const Reachability&) {
            if (!critic) throw std::invalid_argument("reachability constraint needs Q_h");
            return critic(t.s);
          },
          [&](const CumulativeCost& c) {
            if (!critic) throw std::invalid_argument("cumulative-cost constraint needs Q_c");
            return critic(t.s) - c.threshold;
          },
          [&](const Cbf& c) { return HDot(t.h, t.h_next, dt) + c.mu * t.h; },
          [&](const SafetyIndex& si) {
            // Only one finite difference is available per transition, so it
            // serves as hdot for both s and s'.
            const double hdot = HDot(t.h, t.h_next, dt);
            const double phi = SafetyIndexPhi(si, t.h, hdot);
            const double phi_next = SafetyIndexPhi(si, t.h_next, hdot);
            return SafetyIndexCondition(phi, phi_next, si.eta_d);
          },
          [](const RewardShaping&) { return 0.0; },
      },
      kind);
}

double shape_reward(const ConstraintKind& kind, double r, double h) {
  const auto* rs = std::get_if<RewardShaping>(&kind);
  if (!rs) throw std::invalid_argument("shape_reward called for " + AlgorithmName(kind));
  return r - rs->rho * h;
}

}  // namespace rcrl::constraints
