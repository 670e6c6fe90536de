#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rcrl/core/environment.hpp"
#include "rcrl/oracle/grid.hpp"
#include "rcrl/rac/config.hpp"
#include "rcrl/rac/evaluation.hpp"
#include "rcrl/rac/learner.hpp"

namespace rcrl::rac {

/// One row per evaluation event.
struct MetricsRow {
  std::int64_t step = 0;
  double avg_return = 0.0;
  double violation_rate = 0.0;
  double q_loss = 0.0;
  double qh_loss = 0.0;
  double actor_loss = 0.0;
  double mean_lambda_feasible = 0.0;
  double mean_lambda_infeasible = 0.0;
};

std::string MetricsHeader();
std::string FormatMetricsRow(const MetricsRow& row);

struct RunOptions {
  /// Empty: keep everything in memory.
  std::filesystem::path out_dir;
  std::string config_hash;
  /// Hyperparameters stored next to every checkpoint (JSON text).
  std::string config_json = "{}";
  std::string algorithm;
  std::string env_name;
};

struct RunArtifacts {
  std::filesystem::path out_dir;
  std::vector<MetricsRow> metrics;
  std::optional<Learner> learner;
  ProbeSet probes;
  /// Oracle kernel on the probe grid (2-D environments).
  std::optional<oracle::KernelMask> kernel;
  std::vector<StateVec> eval_starts;
  std::vector<std::filesystem::path> checkpoints;
};

/// Raises the allocator's mmap threshold so per-step batch temporaries are
/// recycled instead of mapped afresh. Process-wide; train() calls it.
void TuneAllocator();

/// Actor-critic training: interleaved rollout and updates. Writes the manifest,
/// metrics.csv and checkpoints under options.out_dir when it is set. On
/// error a FAILED marker with the message is written and the exception is
/// rethrown.
RunArtifacts train(const EnvPtr& env, const TrainerConfig& config, std::uint64_t seed,
                   const RunOptions& options = {});

}  // namespace rcrl::rac
