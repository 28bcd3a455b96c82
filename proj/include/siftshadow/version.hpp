#pragma once

namespace siftshadow {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace siftshadow
