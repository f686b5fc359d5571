#pragma once

namespace levyspec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace levyspec
