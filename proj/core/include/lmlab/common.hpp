#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace lmlab {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

// Bad parameters (out-of-domain arguments, malformed patterns, ...).
struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Arithmetic would leave the supported 64-bit width.
struct range_error : std::overflow_error {
    using std::overflow_error::overflow_error;
};

// a + b with wraparound check.
inline u64 checked_add(u64 a, u64 b) {
    if (a > std::numeric_limits<u64>::max() - b)
        throw range_error("64-bit range overflow: " + std::to_string(a) + " + " +
                          std::to_string(b));
    return a + b;
}

inline u64 checked_mul(u64 a, u64 b) {
    if (b != 0 && a > std::numeric_limits<u64>::max() / b)
        throw range_error("64-bit range overflow: " + std::to_string(a) + " * " +
                          std::to_string(b));
    return a * b;
}

// Nonnegative remainder of a signed value, m >= 1.
inline u64 mod_floor(i64 a, u64 m) {
    i64 r = a % static_cast<i64>(m);
    if (r < 0) r += static_cast<i64>(m);
    return static_cast<u64>(r);
}

}  // namespace lmlab
