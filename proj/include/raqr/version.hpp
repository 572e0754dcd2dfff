#pragma once

namespace raqr {
inline constexpr const char* kVersion = "1.0.0";
}
