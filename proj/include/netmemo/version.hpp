#pragma once

#include <string>

#ifndef NETMEMO_GIT_DESCRIBE
#define NETMEMO_GIT_DESCRIBE "unknown"
#endif

namespace netmemo {

inline constexpr const char* kVersion = "0.1.0";

/// "0.1.0 (<git describe>)".
inline std::string version_string() { return std::string(kVersion) + " (" + NETMEMO_GIT_DESCRIBE + ")"; }

}  // namespace netmemo
