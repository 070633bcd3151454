#pragma once

namespace tci {

inline constexpr const char* kVersion = "0.1.0";

} // namespace tci
