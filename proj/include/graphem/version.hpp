#pragma once

namespace graphem {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace graphem
