#include "dehnlab/normal_form.hpp"

#include <algorithm>

#include "dehnlab/errors.hpp"

namespace dehnlab {

IntMatrix NormalFormDecomposition::reassemble(int p) const {
    // g = gamma_{k-1} ... gamma_0 d with gamma_b = m_b * prod_{j<b} u(V_jb)
    IntMatrix acc = IntMatrix::identity(p);
    const int k = partition.count();
    for (int b = k - 1; b >= 0; --b) {
        acc = acc * blocks[static_cast<std::size_t>(b)];
        for (int j = 0; j < b; ++j)
            acc = acc * offdiag[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)];
    }
    return acc * diag.eval(p);
}

Word block_word(const IntMatrix& g, int lo, int q) {
    const int p = g.dim();
    if (q == 0) return Word(Alphabet::SigmaHat);
    // the matrix must be the identity outside the block
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            bool inside = (i >= lo && i < lo + q && j >= lo && j < lo + q);
            if (!inside && g(i, j) != (i == j ? 1 : 0))
                throw DimensionMismatch("block_word: matrix not supported on the block");
        }

    IntMatrix m = g;
    std::vector<Letter> ops; // applied left to right: ops_k ... ops_1 m = diag

    auto row_op = [&](int dst, int src, const Int& x) {
        // left multiplication by e_{dst,src}(x)
        for (int t = lo; t < lo + q; ++t) m(dst, t) += x * m(src, t);
        ops.push_back(Letter::shortcut(dst, src, x));
    };

    for (int c = lo; c < lo + q; ++c) {
        // Euclid on column c over rows c..lo+q-1; the column gcd is 1 because
        // the trailing block keeps determinant +-1
        while (true) {
            int best = -1;
            int nonzero = 0;
            for (int r = c; r < lo + q; ++r) {
                if (m(r, c) == 0) continue;
                ++nonzero;
                if (best < 0 ||
                    boost::multiprecision::abs(m(r, c)) < boost::multiprecision::abs(m(best, c)))
                    best = r;
            }
            if (best < 0) throw NotUnimodular("block_word: singular column");
            if (nonzero == 1) {
                Int v = m(best, c);
                if (v != 1 && v != -1) throw NotUnimodular("block_word: column gcd exceeds 1");
                if (best != c) {
                    row_op(c, best, v);  // m(c,c) becomes v^2 = 1
                    row_op(best, c, -v); // clears the stray pivot
                    continue;
                }
                break; // pivot +-1 at (c, c); a -1 joins the final diagonal
            }
            // reduce every other nonzero row by the pivot with nearest quotients
            for (int r = c; r < lo + q; ++r) {
                if (r == best || m(r, c) == 0) continue;
                Int f = m(r, c) / m(best, c);
                Int rem = m(r, c) - f * m(best, c);
                if (2 * boost::multiprecision::abs(rem) > boost::multiprecision::abs(m(best, c)))
                    f += ((rem > 0) == (m(best, c) > 0)) ? 1 : -1;
                if (f != 0) row_op(r, best, -f);
            }
        }
    }
    // back-substitute the strictly upper entries
    for (int c = lo + q - 1; c >= lo; --c)
        for (int r = lo; r < c; ++r) {
            if (m(r, c) == 0) continue;
            Int f = m(r, c) * m(c, c); // m(c,c) = +-1
            row_op(r, c, -f);
        }

    // residual diagonal of signs
    std::vector<std::int8_t> signs(static_cast<std::size_t>(p), 1);
    int negs = 0;
    for (int t = lo; t < lo + q; ++t) {
        if (m(t, t) == -1) {
            signs[static_cast<std::size_t>(t)] = -1;
            ++negs;
        } else if (m(t, t) != 1) {
            throw NotUnimodular("block_word: reduction left a non-unit pivot");
        }
    }

    // ops applied on the left give E_k ... E_1 m = D, so
    // m = E_1^-1 E_2^-1 ... E_k^-1 D
    Word w(Alphabet::SigmaHat);
    for (const Letter& op : ops) {
        Letter inv = op;
        inv.coeff = -inv.coeff;
        w.push_back(std::move(inv));
    }
    if (negs > 0) w.push_back(Letter::diagonal(signs));
    return w;
}

NormalForm normal_form(const IntMatrix& g) {
    const int p = g.dim();
    if (g.det() != 1) throw NotUnimodular("normal_form: determinant must be 1");

    NormalForm out;
    out.decomposition.partition = minimal_parabolic(g);
    const BlockPartition& part = out.decomposition.partition;
    const int k = part.count();

    // diagonal d with the sign of each block determinant at the block head
    std::vector<std::int8_t> dsign(static_cast<std::size_t>(p), 1);
    for (int b = 0; b < k; ++b) {
        IntMatrix mb(part.sizes()[static_cast<std::size_t>(b)]);
        for (int i = 0; i < mb.dim(); ++i)
            for (int j = 0; j < mb.dim(); ++j) mb(i, j) = g(part.start(b) + i, part.start(b) + j);
        Int det = mb.det();
        if (det == -1) dsign[static_cast<std::size_t>(part.start(b))] = -1;
        else if (det != 1)
            throw NotUnimodular("normal_form: block determinant not a unit");
    }
    out.decomposition.diag = Letter::diagonal(dsign);

    // B = g d^-1 = g d has det-1 diagonal blocks
    IntMatrix B = g * out.decomposition.diag.eval(p);

    out.decomposition.blocks.assign(static_cast<std::size_t>(k), IntMatrix::identity(p));
    out.decomposition.offdiag.assign(static_cast<std::size_t>(k),
                                     std::vector<IntMatrix>(static_cast<std::size_t>(k),
                                                            IntMatrix::identity(p)));
    for (int b = 0; b < k; ++b) {
        IntMatrix& mb = out.decomposition.blocks[static_cast<std::size_t>(b)];
        for (int i = part.start(b); i < part.end(b); ++i)
            for (int j = part.start(b); j < part.end(b); ++j) mb(i, j) = B(i, j);
    }
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            IntMatrix& u = out.decomposition.offdiag[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            for (int i = part.start(a); i < part.end(a); ++i)
                for (int j = part.start(b); j < part.end(b); ++j) u(i, j) = B(i, j);
        }

    // word: gamma-hat_{k-1} ... gamma-hat_0 then the diagonal letter
    Word w(Alphabet::SigmaHat);
    for (int b = k - 1; b >= 0; --b) {
        w = w.concat(block_word(out.decomposition.blocks[static_cast<std::size_t>(b)], part.start(b),
                                part.sizes()[static_cast<std::size_t>(b)]));
        for (int j = 0; j < b; ++j) {
            for (int i = part.start(j); i < part.end(j); ++i)
                for (int c = part.start(b); c < part.end(b); ++c) {
                    const Int& x = B(i, c);
                    if (x != 0) w.push_back(Letter::shortcut(i, c, x));
                }
        }
    }
    if (!out.decomposition.diag.is_identity_diagonal()) w.push_back(out.decomposition.diag);
    out.word = std::move(w);
    return out;
}

} // namespace dehnlab
