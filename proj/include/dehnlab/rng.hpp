#pragma once

#include <cstdint>

#include "dehnlab/ints.hpp"

namespace dehnlab {

// Deterministic RNG with a stable cross-platform stream (splitmix64).  All
// randomized suites derive per-instance seeds from a manifest seed so reruns
// are byte-identical.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n), n > 0
    std::uint64_t below(std::uint64_t n) {
        // rejection-free bounded draw (Lemire), deterministic everywhere
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        return static_cast<std::uint64_t>(m >> 64);
    }

    // uniform in [lo, hi] inclusive
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool coin() { return (next() & 1) != 0; }

    double real01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // nonzero integer with |x| <= 2^bits, magnitude uniform over bit lengths
    Int nonzero_int(int bits) {
        int b = static_cast<int>(below(static_cast<std::uint64_t>(bits))) + 1;
        Int x = 0;
        for (int got = 0; got < b; got += 32) {
            x <<= 32;
            x += static_cast<std::uint32_t>(next());
        }
        x &= (Int(1) << b) - 1;
        if (x == 0) x = 1;
        if (coin()) x = -x;
        return x;
    }

    // derive an independent child stream
    Rng child(std::uint64_t salt) const {
        Rng tmp(state_ ^ (0xd1342543de82ef95ULL * (salt + 1)));
        tmp.next();
        return tmp;
    }

private:
    std::uint64_t state_;
};

} // namespace dehnlab
