#pragma once

namespace permoments {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace permoments
