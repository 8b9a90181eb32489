#pragma once

namespace coopmag {
inline constexpr const char* kToolName = "coopmag";
inline constexpr const char* kToolVersion = "0.1.0";
}  // namespace coopmag
