#pragma once

namespace scav {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace scav
