#pragma once

namespace mtlab {
inline constexpr const char* version_string = "0.1.0";
}
