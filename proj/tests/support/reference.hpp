#pragma once

// Forward-only reimplementations used as oracles in gradient checks. Nothing
// here calls Mlp::Forward/Backward or the learner's loss code; they only read
// parameter vectors, shapes and configuration.

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rcrl/approx/mlp.hpp"
#include "rcrl/envs/quadrotor.hpp"
#include "rcrl/rac/learner.hpp"

namespace rcrl::testing {

/// Scalar-loop forward pass of an Mlp layout on one input.
Eigen::VectorXd ReferenceForward(const approx::MlpShape& shape, const Eigen::VectorXd& params,
                                 const Eigen::VectorXd& x);

/// Independent evaluation of the learner's losses from raw parameters.
class ReferenceLosses {
 public:
  explicit ReferenceLosses(const rac::Learner& learner) : l_(learner) {}

  /// mean 1/2 (Q_w(s, a) - y)^2
  double Critic(const Eigen::VectorXd& w, const rac::Batch& b, const Eigen::VectorXd& y) const;
  /// Same for the constraint critic's parameters.
  double SafetyCritic(const Eigen::VectorXd& phi, const rac::Batch& b,
                      const Eigen::VectorXd& y) const;
  /// mean[-Q(s, pi_theta(s)) + lambda(s) F(s, pi_theta(s))]
  double Actor(const Eigen::VectorXd& theta, const rac::Batch& b) const;
  /// mean[lambda_xi(s) F(s, pi(s))] with F fixed.
  double Multiplier(const Eigen::VectorXd& xi, const rac::Batch& b) const;

  Eigen::VectorXd State(const Eigen::VectorXd& s) const;
  Eigen::VectorXd Action(const Eigen::VectorXd& a) const;

 private:
  double Regression(const approx::MlpShape& shape, const Eigen::VectorXd& p, const rac::Batch& b,
                    const Eigen::VectorXd& y) const;
  double Threshold() const;

  const rac::Learner& l_;
};

/// Central differences of f at x with step h.
Eigen::VectorXd CentralDifference(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& x, double h = 1e-5);

/// ||g - fd|| / max(||g||, ||fd||); 0 when both vanish.
double RelativeError(const Eigen::VectorXd& g, const Eigen::VectorXd& fd);

/// Tracking reward as an explicit quadratic form with dense Q and R.
double ReferenceQuadReward(const Eigen::VectorXd& x, const Eigen::VectorXd& a,
                           const Eigen::VectorXd& ref_x, const Eigen::VectorXd& ref_a,
                           const envs::Quadrotor2DParams& p = {});

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string ReadFile(const std::filesystem::path& path);

}  // namespace rcrl::testing
