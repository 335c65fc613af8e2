#pragma once

#include <string_view>

namespace purex {

enum class Algorithm { TaS, STaS };

inline std::string_view to_string(Algorithm a) { return a == Algorithm::TaS ? "tas" : "stas"; }

}  // namespace purex
