#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <optional>
#include <vector>

#include "dehnlab/matrix.hpp"
#include "dehnlab/rng.hpp"
#include "dehnlab/symspace.hpp"
#include "dehnlab/word.hpp"

namespace dehnlab::testing {

// all contiguous partitions of {0..p-1}, by cut bitmask
inline std::vector<BlockPartition> all_contiguous_partitions(int p) {
    std::vector<BlockPartition> out;
    for (int mask = 0; mask < (1 << (p - 1)); ++mask) {
        std::vector<int> sizes;
        int last = 0;
        for (int c = 1; c < p; ++c)
            if (mask & (1 << (c - 1))) {
                sizes.push_back(c - last);
                last = c;
            }
        sizes.push_back(p - last);
        out.push_back(BlockPartition(sizes));
    }
    return out;
}

// brute-force minimal parabolic: scan every contiguous partition, keep the
// finest one that contains g
inline BlockPartition minimal_parabolic_bruteforce(const IntMatrix& g) {
    BlockPartition best({g.dim()});
    int best_blocks = 1;
    for (const BlockPartition& part : all_contiguous_partitions(g.dim()))
        if (in_block_group(g, part) && part.count() > best_blocks) {
            best = part;
            best_blocks = part.count();
        }
    return best;
}

// random word over Sigma-hat with bounded coefficients
inline Word random_word(Rng& rng, int p, int len, int coeff_bits, bool shortcuts_only = false) {
    Word w(Alphabet::SigmaHat);
    for (int t = 0; t < len; ++t) {
        int kind = static_cast<int>(rng.below(shortcuts_only ? 1 : 3));
        int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
        int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(p - 1)));
        if (j >= i) ++j;
        switch (kind) {
        case 0:
            w.push_back(Letter::shortcut(i, j, rng.nonzero_int(coeff_bits), rng.coin() ? 1 : -1));
            break;
        case 1:
            w.push_back(Letter::elementary(i, j, rng.coin() ? 1 : -1));
            break;
        default: {
            std::vector<std::int8_t> d(static_cast<std::size_t>(p), 1);
            int flips = 2 * static_cast<int>(rng.below(static_cast<std::uint64_t>(p / 2) + 1));
            for (int f = 0; f < flips; ++f) {
                int pos;
                do {
                    pos = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
                } while (d[static_cast<std::size_t>(pos)] < 0);
                d[static_cast<std::size_t>(pos)] = -1;
            }
            w.push_back(Letter::diagonal(d, rng.coin() ? 1 : -1));
            break;
        }
        }
    }
    return w;
}

// random SL(p;Z) element as a product of elementary matrices
inline IntMatrix random_unimodular(Rng& rng, int p, int factors, int coeff_bits) {
    IntMatrix g = IntMatrix::identity(p);
    for (int t = 0; t < factors; ++t) {
        int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
        int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(p - 1)));
        if (j >= i) ++j;
        g = g * IntMatrix::elementary(p, i, j, rng.nonzero_int(coeff_bits));
    }
    return g;
}

// independent p = 2 reduction oracle: classical Gauss / continued-fraction
// reduction of the rank-2 form, run on the exact dyadic Gram with the same
// sign and determinant conventions as siegel_reduce
inline IntMatrix gauss_reduce_p2(const SymmetricPoint& x) {
    Int q00 = x.exact.num[0][0], q01 = x.exact.num[0][1], q11 = x.exact.num[1][1];
    IntMatrix u = IntMatrix::identity(2);
    // bottom-up convention: row 1 is the short row, n01 = q01 / q11
    for (int rounds = 0; rounds < 4096; ++rounds) {
        if (2 * boost::multiprecision::abs(q01) > q11) {
            Int c = q01 / q11;
            Int rem = q01 - c * q11;
            if (2 * boost::multiprecision::abs(rem) > q11) c += rem > 0 ? 1 : -1;
            for (int t = 0; t < 2; ++t) u(0, t) -= c * u(1, t);
            q00 = q00 - 2 * c * q01 + c * c * q11;
            q01 = q01 - c * q11;
            continue;
        }
        if (q00 < q11) {
            std::swap(q00, q11);
            Int a = u(0, 0), b = u(0, 1);
            u(0, 0) = u(1, 0);
            u(0, 1) = u(1, 1);
            u(1, 0) = a;
            u(1, 1) = b;
            continue;
        }
        break;
    }
    if (u.det() == -1) {
        u(1, 0) = -u(1, 0);
        u(1, 1) = -u(1, 1);
        q01 = -q01;
    }
    // sign canonicalization: significant n01 made positive by flipping row 0
    if (q01 != 0 && 2 * boost::multiprecision::abs(q01) > q11 / 1000000000 && q01 < 0) {
        u(0, 0) = -u(0, 0);
        u(0, 1) = -u(0, 1);
    }
    return u.inverse();
}

} // namespace dehnlab::testing
