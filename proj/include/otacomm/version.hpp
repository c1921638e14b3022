#pragma once

namespace otacomm {

inline constexpr const char* kVersion = "0.1.0";

} // namespace otacomm
