#pragma once

namespace nlpde {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nlpde
