#pragma once

namespace voskit {

inline constexpr const char* kToolName = "voskit";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace voskit
