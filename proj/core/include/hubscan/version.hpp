#pragma once

namespace hubscan {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hubscan
