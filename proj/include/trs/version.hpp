#pragma once

namespace trs {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace trs
