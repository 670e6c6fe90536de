#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rcrl/approx/mlp.hpp"

namespace rcrl::approx {

struct NamedNetwork {
  std::string name;
  Mlp net;
};

/// Binary layout (little-endian): "RCRLCKPT", uint32 version, uint32 count,
/// then per network: name, shape table, uint64 n, n float64 parameters.
/// The sidecar (hyperparameters as JSON text) is written to `<path>.json`.
void SaveCheckpoint(const std::filesystem::path& path, const std::vector<NamedNetwork>& nets,
                    const std::string& sidecar_json);

std::vector<NamedNetwork> LoadCheckpoint(const std::filesystem::path& path);

/// Sidecar text, or empty if there is none.
std::string LoadSidecar(const std::filesystem::path& checkpoint_path);

/// Looks up a network by name; throws std::runtime_error if absent.
const Mlp& FindNetwork(const std::vector<NamedNetwork>& nets, const std::string& name);

}  // namespace rcrl::approx
