#pragma once

#include <string>

namespace rcrl {

/// Package version with git metadata when the build had it.
std::string VersionString();

}  // namespace rcrl
