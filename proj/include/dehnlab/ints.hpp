#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <string>

namespace dehnlab {

// Exact arbitrary-precision integer used throughout the group layer.
using Int = boost::multiprecision::cpp_int;

inline int bit_length(const Int& x) {
    if (x == 0) return 0;
    return static_cast<int>(boost::multiprecision::msb(boost::multiprecision::abs(x))) + 1;
}

// floor(log2 |x|) for x != 0.
inline int floor_log2_abs(const Int& x) { return bit_length(x) - 1; }

// max(1, log2 |x|), the log-scale used by the cost model.  Returns 1 for
// |x| <= 2 and exact log2 via double conversion above that (inputs in the
// cost model never need more than a few thousand bits).
inline double barlog(const Int& x) {
    Int a = boost::multiprecision::abs(x);
    if (a <= 2) return 1.0;
    int bits = bit_length(a);
    if (bits <= 52) return std::max(1.0, std::log2(static_cast<double>(a)));
    // keep the top 52 bits and rescale
    Int top = a >> (bits - 52);
    return std::max(1.0, std::log2(static_cast<double>(top)) + static_cast<double>(bits - 52));
}

inline double to_double(const Int& x) { return static_cast<double>(x); }

inline std::string to_string(const Int& x) { return x.str(); }

} // namespace dehnlab
