#pragma once

#include <cstdint>
#include <vector>

#include "dehnlab/ints.hpp"
#include "dehnlab/word.hpp"

namespace dehnlab {

// Words over Sigma of length O(log|x|) representing e_ab(x), built inside the
// 3x3 block {a, d, b}.  The coefficient is carried by conjugating unit column
// vectors at column b with powers of the hyperbolic element
//   C = e_ad(1) e_da(1)  (acts as [[2,1],[1,1]] on the (a,d) column pair),
// so x decomposes into a short two-sided digit expansion sum C^k * delta.

// length bound shipped with the artifact: len <= kShortcutLengthFactor * (1 + floor(log2|x|))
inline constexpr double kShortcutLengthFactor = 12.0;

// deterministic word over Sigma evaluating exactly to e_ab(x); p >= 3, a != b, x != 0
Word build_shortcut(int a, int b, const Int& x, int p);

// same, with the helper index chosen inside [lo, lo + q); needs q >= 3
Word build_shortcut_in_block(int a, int b, const Int& x, int p, int lo, int q);

// lambda over a block: shortcut letters expand inside [lo, lo + q)
Word lambda_expand_in_block(const Word& w, int p, int lo, int q);

// number of letters build_shortcut(a, b, x, p) would emit, without building it
std::int64_t shortcut_expansion_length(const Int& x);

// replaces shortcut letters by their realizations; elementary and diagonal
// letters pass through; evaluation is preserved exactly
Word lambda_expand(const Word& w, int p);

// expanded length: l^(w) = l_w(lambda_expand(w, p)); independent of p
std::int64_t shortcut_length(const Word& w);

// one row of the calibration table for the shipped length constant
struct ShortcutCalibrationRow {
    Int x;
    std::int64_t length = 0;
    double ratio = 0.0; // length / (1 + floor(log2|x|))
};

std::vector<ShortcutCalibrationRow> calibrate_shortcuts(int max_pow, int random_count,
                                                        std::uint64_t seed);

} // namespace dehnlab
