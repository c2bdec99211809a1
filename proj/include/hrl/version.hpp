#pragma once

namespace hrl {

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kConfigFormatVersion = 1;
inline constexpr int kDbFormatVersion = 1;
inline constexpr int kCurveFormatVersion = 1;
inline constexpr const char* kBuildId = "hrldial-1.0.0";

}  // namespace hrl
