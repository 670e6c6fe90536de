#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rcrl/envs/registry.hpp"
#include "rcrl/oracle/sbe.hpp"
#include "rcrl/rac/config.hpp"

namespace rcrl::cli {

struct OracleSettings {
  int grid = 201;
  double gamma = 0.99;
  int action_samples = 21;
  double tolerance = 1e-6;
  int max_sweeps = 20000;
  /// Negative: one fifth of the grid on each side.
  int pad_cells = -1;

  oracle::OracleConfig ToOracleConfig() const;
  bool operator==(const OracleSettings&) const = default;
};

struct SliceSettings {
  int resolution = 101;
  /// Vertical velocities of the quadrotor xz-slices.
  std::vector<double> zdots = {-1.0, 0.0, 1.0};
  bool operator==(const SliceSettings&) const = default;
};

/// Everything a command needs, as read from a TOML file.
struct RunConfig {
  std::uint64_t seed = 0;
  /// Output root; empty defers to --out-root, RCRL_OUT_ROOT, then "out".
  std::string out_root;
  std::string env_name = "double_integrator";
  envs::EnvParams env_params;
  rac::TrainerConfig train;
  OracleSettings oracle;
  /// Double-integrator evaluation starts drawn inside the oracle kernel.
  int eval_starts = 100;
  SliceSettings slice;

  std::string algorithm() const;
  /// Field-level checks (ConfigError) including the trainer's.
  void Validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Parses TOML text. Unknown keys, wrong types and bad enum values throw
/// ConfigError naming the dotted key. `overrides` are "dotted.key=value"
/// strings applied before conversion; values are TOML literals, anything
/// that does not parse as one is taken as a bare string.
RunConfig ParseRunConfig(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig LoadRunConfig(const std::filesystem::path& path,
                        const std::vector<std::string>& overrides = {});

/// Canonical TOML; ParseRunConfig(SerializeRunConfig(c)) == c.
std::string SerializeRunConfig(const RunConfig& config);
std::string ToJson(const RunConfig& config);

/// FNV-1a 64 of the canonical TOML without the output root, as 16 hex digits.
std::string ConfigHash(const RunConfig& config);

}  // namespace rcrl::cli
