#pragma once

namespace qhot {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "qhot";

}  // namespace qhot
