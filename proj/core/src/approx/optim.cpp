#include "rcrl/approx/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rcrl/core/errors.hpp"

namespace rcrl::approx {

double LinearSchedule::at(std::int64_t k) const {
  if (k >= steps) return end;
  const double frac = static_cast<double>(std::max<std::int64_t>(k, 0)) / static_cast<double>(steps);
  return start + (end - start) * frac;
}

void LinearSchedule::Validate(const char* field) const {
  if (!(start > 0.0) || !(end > 0.0)) throw ConfigError(field, "learning rates must be > 0");
  if (steps < 1) throw ConfigError(field, "anneal steps must be >= 1");
}

AdamState::AdamState(AdamConfig cfg, Eigen::Index size)
    : config(cfg), m(Eigen::VectorXd::Zero(size)), v(Eigen::VectorXd::Zero(size)) {}

void ProjectionSpec::Validate() const {
  if (!(clip_norm > 0.0)) throw ConfigError("clip_norm", "must be > 0");
  if (box_low.size() != box_high.size()) {
    throw DimensionMismatch("projection box bounds differ in length");
  }
}

Eigen::VectorXd ClipByNorm(const Eigen::VectorXd& grad, double threshold) {
  const double norm = grad.norm();
  if (norm <= threshold) return grad;
  return grad * (threshold / norm);
}

void AdamStep(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& adam,
              const ProjectionSpec& proj) {
  AdamStep(params, grad, adam, proj, adam.learning_rate());
}

void AdamStep(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& adam,
              const ProjectionSpec& proj, double lr) {
  if (grad.size() != params.size() || adam.m.size() != params.size() ||
      adam.v.size() != params.size()) {
    throw DimensionMismatch("Adam step: parameter, gradient and moment lengths differ");
  }
  if (!grad.allFinite()) throw NonFiniteValue("Adam step: gradient is not finite");
  if (proj.box_low.size() != 0 && proj.box_low.size() != params.size()) {
    throw DimensionMismatch("Adam step: projection box does not match parameters");
  }
  const Eigen::VectorXd g = ClipByNorm(grad, proj.clip_norm);
  const AdamConfig& c = adam.config;
  ++adam.step;
  adam.m = c.beta1 * adam.m + (1.0 - c.beta1) * g;
  adam.v = c.beta2 * adam.v + (1.0 - c.beta2) * g.cwiseProduct(g);
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(adam.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(adam.step));
  params.array() -= lr * (adam.m.array() / bc1) / ((adam.v.array() / bc2).sqrt() + c.eps);
  if (proj.box_low.size() != 0) params = params.cwiseMax(proj.box_low).cwiseMin(proj.box_high);
}

void PolyakUpdate(Eigen::VectorXd& target, const Eigen::VectorXd& online, double tau) {
  if (target.size() != online.size()) throw DimensionMismatch("Polyak update: shapes differ");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("Polyak tau must lie in [0, 1]");
  if (tau == 1.0) {
    target = online;
    return;
  }
  target = (1.0 - tau) * target + tau * online;
}

}  // namespace rcrl::approx
