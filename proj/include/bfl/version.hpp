#pragma once

namespace bfl {
inline constexpr const char* kVersion = "0.1.0";
}
