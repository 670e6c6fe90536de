#pragma once

#include <cstdint>
#include <string>

namespace rcrl::testing {

enum class UpdateOp { kCritic, kSafetyCritic, kActor, kMultiplier };

std::string ToString(UpdateOp op);

struct GradientTrial {
  double relative_error = 0.0;
  /// |loss reported by the learner - reference loss|.
  double loss_gap = 0.0;
  int width = 0;
  std::string algorithm;
};

/// One randomized check: a double-integrator learner with hidden width in
/// [8, 16], a random constraint kind (one with a multiplier for kMultiplier),
/// perturbed target networks and a random batch containing boundary exits.
/// Compares the analytic gradient against central differences (step 1e-5)
/// of the forward-only reference loss.
GradientTrial RunGradientTrial(UpdateOp op, std::uint64_t seed);

}  // namespace rcrl::testing
