#pragma once

#include <map>
#include <string>
#include <vector>

#include "rcrl/core/environment.hpp"

namespace rcrl::envs {

/// Scalar environment parameters keyed by name, as read from a run config.
using EnvParams = std::map<std::string, double>;

/// Builds a registered environment. Unknown names or parameter keys throw
/// ConfigError.
EnvPtr MakeEnvironment(const std::string& name, const EnvParams& params = {});

std::vector<std::string> RegisteredEnvironments();

}  // namespace rcrl::envs
