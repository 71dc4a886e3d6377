#pragma once

// Deterministic number formatting for text exports (shortest round-trip).

#include <charconv>
#include <string>

namespace gmtd {

inline std::string double_to_string(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace gmtd
