#pragma once

namespace bellkl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bellkl
