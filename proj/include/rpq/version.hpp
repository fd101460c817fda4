#pragma once

namespace rpq {
inline constexpr const char *kVersion = "0.1.0";
}
