#pragma once

namespace cumdiff {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cumdiff
