#pragma once

namespace rici {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace rici
