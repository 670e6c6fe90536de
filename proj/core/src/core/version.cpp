#include "rcrl/core/version.hpp"

#ifndef RCRL_VERSION
#define RCRL_VERSION "unknown"
#endif

namespace rcrl {

std::string VersionString() { return RCRL_VERSION; }

}  // namespace rcrl
