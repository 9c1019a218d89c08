#pragma once

namespace rotsense {
inline constexpr const char* kVersion = "0.1.0";
}
