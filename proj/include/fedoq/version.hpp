#pragma once

namespace fedoq {

inline constexpr const char* kVersion = "0.1.0";

} // namespace fedoq
