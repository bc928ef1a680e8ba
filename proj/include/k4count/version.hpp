#pragma once

namespace k4c {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace k4c
