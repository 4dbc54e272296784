#pragma once

namespace homokin {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace homokin
