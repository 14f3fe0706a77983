#pragma once

namespace bmot {

inline constexpr const char* kVersion = "bmot 0.1.0";

}  // namespace bmot
