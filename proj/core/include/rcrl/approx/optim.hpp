#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace rcrl::approx {

/// Linear schedule from `start` (step 0) to `end` (step `steps`), constant
/// afterwards.
struct LinearSchedule {
  double start = 1e-4;
  double end = 1e-4;
  std::int64_t steps = 1;

  double at(std::int64_t k) const;
  void Validate(const char* field) const;
  bool operator==(const LinearSchedule&) const = default;
};

struct AdamConfig {
  LinearSchedule lr;
  double beta1 = 0.99;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t step = 0;

  AdamState() = default;
  AdamState(AdamConfig cfg, Eigen::Index size);

  /// Learning rate the next step will use.
  double learning_rate() const { return config.lr.at(step); }
};

/// Gradient-side projection: clip the global L2 norm, then optionally keep
/// parameters inside a box.
struct ProjectionSpec {
  double clip_norm = 10.0;
  Eigen::VectorXd box_low;   // empty = unbounded
  Eigen::VectorXd box_high;

  void Validate() const;
};

/// Returns `grad` rescaled so its L2 norm is at most `threshold`.
Eigen::VectorXd ClipByNorm(const Eigen::VectorXd& grad, double threshold);

/// One Adam descent step with bias correction on the clipped gradient.
/// Throws NonFiniteValue if `grad` has a NaN/inf entry; params and state are
/// untouched in that case.
void AdamStep(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& adam,
              const ProjectionSpec& proj);
/// As above with an externally scheduled learning rate.
void AdamStep(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& adam,
              const ProjectionSpec& proj, double lr);

/// target <- (1 - tau) target + tau online.
void PolyakUpdate(Eigen::VectorXd& target, const Eigen::VectorXd& online, double tau);

}  // namespace rcrl::approx
