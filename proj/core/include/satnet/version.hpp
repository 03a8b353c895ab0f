#pragma once

namespace satnet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace satnet
