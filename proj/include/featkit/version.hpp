#pragma once

namespace featkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace featkit
