#pragma once

namespace ordermc {

inline constexpr const char* kToolName = "ordermc";
inline constexpr const char* kVersion = "0.1.0";

} // namespace ordermc
