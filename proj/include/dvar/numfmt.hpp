#pragma once

#include <array>
#include <charconv>
#include <string>

namespace dvar {

/// Shortest decimal representation that round-trips the double bit-exactly.
inline std::string shortest_repr(double v) {
    std::array<char, 32> buf;
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

} // namespace dvar
