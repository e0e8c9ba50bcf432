#pragma once

namespace burstpdmp {

inline constexpr const char* kVersion = "0.1.0";

} // namespace burstpdmp
