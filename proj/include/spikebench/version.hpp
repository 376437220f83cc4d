#pragma once

namespace spikebench {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spikebench
