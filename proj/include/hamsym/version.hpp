#pragma once

namespace hamsym {
inline constexpr const char* version = "0.1.0";
}
