#pragma once

namespace cdnet {
inline constexpr const char* kVersion = "0.1.0";
}
