#pragma once

namespace qaec {
inline constexpr const char* kVersion = "0.1.0";
}
