#pragma once

namespace slrt {
inline constexpr const char* kVersion = "0.1.0";
}
