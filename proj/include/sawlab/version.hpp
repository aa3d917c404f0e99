#pragma once

namespace sawlab {
inline constexpr const char* kVersion = "sawlab 0.1.0";
}
