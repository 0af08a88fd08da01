#pragma once

#include <vector>

#include "dehnlab/matrix.hpp"
#include "dehnlab/word.hpp"

namespace dehnlab {

// shipped bound: expanded length of the normal-form word for g is at most
// kNormalFormFactor * (1 + log2 ||g||_2)
inline constexpr double kNormalFormFactor = 160.0;

// Block decomposition along the minimal parabolic containing g:
// g = (block upper matrix with det-1 diagonal blocks) * d.
struct NormalFormDecomposition {
    BlockPartition partition;
    Letter diag;                        // d, a sign diagonal
    std::vector<IntMatrix> blocks;      // m_i, full-size embeddings, det 1
    std::vector<std::vector<IntMatrix>> offdiag; // V_ij blocks as full-size u(V)

    IntMatrix reassemble(int p) const;
};

struct NormalForm {
    NormalFormDecomposition decomposition;
    Word word; // over SigmaHat, evaluates to g exactly
};

// word over SigmaHat_q for a det-1 matrix supported on [lo, lo+q), built by
// integer row reduction with pivots chosen to limit coefficient growth
Word block_word(const IntMatrix& g, int lo, int q);

NormalForm normal_form(const IntMatrix& g);

} // namespace dehnlab
