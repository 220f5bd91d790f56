#pragma once

namespace advdrop {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace advdrop
