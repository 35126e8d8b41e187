#pragma once

namespace wsd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wsd
