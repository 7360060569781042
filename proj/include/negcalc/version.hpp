#pragma once

namespace negcalc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace negcalc
