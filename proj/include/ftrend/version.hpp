#pragma once

namespace ftrend {

inline constexpr const char* version = "0.1.0";

}  // namespace ftrend
