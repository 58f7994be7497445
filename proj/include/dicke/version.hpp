#pragma once

namespace dicke {

inline constexpr const char* version = "0.1.0";

} // namespace dicke
