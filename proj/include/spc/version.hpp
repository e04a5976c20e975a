#pragma once

namespace spc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spc
