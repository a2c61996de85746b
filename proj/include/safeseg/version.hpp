#pragma once

namespace safeseg {

inline constexpr const char* kToolName = "safeseg";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace safeseg
