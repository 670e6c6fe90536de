#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rcrl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct CommonOptions {
  std::filesystem::path config;
  std::vector<std::string> overrides;
  /// Empty: config out_root, then $RCRL_OUT_ROOT, then "out".
  std::string out_root;
  bool force = false;
};

struct CheckpointOptions {
  CommonOptions common;
  std::filesystem::path checkpoint;
  /// eval: JSON path (default <checkpoint>.eval.json); slice: directory
  /// (default <checkpoint dir>/slices).
  std::string out;
};

/// Artifacts go to <root>/<config stem>_seed<seed>.
int CmdTrain(const CommonOptions& opt);
/// Artifacts go to <root>/<config stem>_oracle.
int CmdOracle(const CommonOptions& opt);
int CmdEval(const CheckpointOptions& opt);
int CmdSlice(const CheckpointOptions& opt);

/// Parses argv and dispatches. Returns the process exit code.
int RunCli(int argc, char** argv);

}  // namespace rcrl::cli
