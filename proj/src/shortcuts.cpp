#include "dehnlab/shortcuts.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "dehnlab/errors.hpp"
#include "dehnlab/rng.hpp"

namespace dehnlab {

namespace {

// column pair (va, vd) at column b
struct Vec2 {
    Int a, d;
    bool zero() const { return a == 0 && d == 0; }
};

// powers of C = [[2,1],[1,1]] and its inverse, C^k applied to a digit
struct Mat2 {
    Int m00, m01, m10, m11;
    Vec2 apply(int da, int dd) const {
        return Vec2{m00 * da + m01 * dd, m10 * da + m11 * dd};
    }
};

struct Atom {
    int k;      // power of C
    int da, dd; // digit, |.| <= 2
};

// top bits of v as a scaled long double: v ~ result * 2^shift
long double scaled_top(const Int& v, int shift) {
    if (v == 0) return 0.0L;
    Int a = boost::multiprecision::abs(v);
    int bits = bit_length(a);
    long double m;
    if (bits <= 62) {
        m = static_cast<long double>(static_cast<std::int64_t>(a));
        m = ldexpl(m, -shift);
    } else {
        Int top = a >> (bits - 62);
        m = ldexpl(static_cast<long double>(static_cast<std::int64_t>(top)), bits - 62 - shift);
    }
    return v < 0 ? -m : m;
}

// greedy two-sided digit expansion: x*e_a = sum C^k delta_k.  Candidate
// selection runs in scaled long double over a window of exponents around the
// current magnitude; the state update is exact.
std::vector<Atom> digit_expansion(const Int& x) {
    const int kmax = static_cast<int>(bit_length(x) * 0.7202) + 4;
    std::vector<Mat2> pos(static_cast<std::size_t>(kmax) + 1), neg(static_cast<std::size_t>(kmax) + 1);
    pos[0] = neg[0] = Mat2{1, 0, 0, 1};
    for (int k = 1; k <= kmax; ++k) {
        const Mat2& q = pos[static_cast<std::size_t>(k) - 1];
        pos[static_cast<std::size_t>(k)] = Mat2{2 * q.m00 + q.m10, 2 * q.m01 + q.m11, q.m00 + q.m10, q.m01 + q.m11};
        // C^-1 = [[1,-1],[-1,2]], applied on the left of the previous power
        const Mat2& r = neg[static_cast<std::size_t>(k) - 1];
        neg[static_cast<std::size_t>(k)] =
            Mat2{r.m00 - r.m10, r.m01 - r.m11, -r.m00 + 2 * r.m10, -r.m01 + 2 * r.m11};
    }
    auto power = [&](int k) -> const Mat2& {
        return k >= 0 ? pos[static_cast<std::size_t>(k)] : neg[static_cast<std::size_t>(-k)];
    };

    Vec2 X{x, 0};
    std::vector<Atom> atoms;
    const int cap = 4 * bit_length(x) + 64;
    std::vector<int> ks;
    while (!X.zero()) {
        if (static_cast<int>(atoms.size()) > cap) throw Error("shortcut digit expansion did not terminate");

        int bits = std::max(bit_length(X.a), bit_length(X.d));
        int shift = std::max(0, bits - 40);
        long double xa = scaled_top(X.a, shift);
        long double xd = scaled_top(X.d, shift);

        // exponent window near the current magnitude plus the endgame window
        int kstar = static_cast<int>(bits * 0.7202);
        ks.clear();
        for (int k = -3; k <= 3; ++k)
            if (std::abs(k) <= kmax) ks.push_back(k);
        for (int d = -3; d <= 3; ++d) {
            int k = kstar + d;
            if (k > 3 && k <= kmax) {
                ks.push_back(k);
                ks.push_back(-k);
            }
        }

        long double best_norm = -1.0L;
        Atom best{0, 0, 0};
        for (int k : ks) {
            const Mat2& M = power(k);
            long double ca_a = scaled_top(M.m00, shift), ca_d = scaled_top(M.m10, shift);
            long double cd_a = scaled_top(M.m01, shift), cd_d = scaled_top(M.m11, shift);
            for (int da = -2; da <= 2; ++da)
                for (int dd = -2; dd <= 2; ++dd) {
                    if (da == 0 && dd == 0) continue;
                    long double ra = xa - da * ca_a - dd * cd_a;
                    long double rd = xd - da * ca_d - dd * cd_d;
                    long double n = ra * ra + rd * rd;
                    if (best_norm < 0.0L || n < best_norm) {
                        best_norm = n;
                        best = Atom{k, da, dd};
                    }
                }
        }
        Vec2 v = power(best.k).apply(best.da, best.dd);
        X.a -= v.a;
        X.d -= v.d;
        atoms.push_back(best);
    }
    std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.k < r.k; });
    return atoms;
}

std::int64_t assembled_length(const std::vector<Atom>& atoms) {
    if (atoms.empty()) return 0;
    std::int64_t len = 0;
    int at = 0;
    for (const Atom& t : atoms) {
        len += 2 * std::abs(t.k - at); // two letters per C step
        at = t.k;
        len += std::abs(t.da) + std::abs(t.dd);
    }
    len += 2 * std::abs(at); // walk back to C^0
    return len;
}

} // namespace

Word build_shortcut(int a, int b, const Int& x, int p) {
    return build_shortcut_in_block(a, b, x, p, 0, p);
}

Word build_shortcut_in_block(int a, int b, const Int& x, int p, int lo, int q) {
    if (q < 3) throw DimensionMismatch("shortcut words need a block of size >= 3");
    if (a == b || a < lo || b < lo || a >= lo + q || b >= lo + q || lo + q > p)
        throw IndexClash("build_shortcut: bad indices");
    if (x == 0) throw ParseError("build_shortcut: x == 0");

    int d = lo;
    while (d == a || d == b) ++d;

    std::vector<Atom> atoms = digit_expansion(x);

    Word w(Alphabet::Sigma);
    auto step_C = [&](int dir, int times) {
        // C = e_ad e_da, C^-1 = e_da^-1 e_ad^-1
        for (int t = 0; t < times; ++t) {
            if (dir > 0) {
                w.push_back(Letter::elementary(a, d, 1));
                w.push_back(Letter::elementary(d, a, 1));
            } else {
                w.push_back(Letter::elementary(d, a, -1));
                w.push_back(Letter::elementary(a, d, -1));
            }
        }
    };

    int at = 0;
    for (const Atom& t : atoms) {
        if (t.k != at) {
            step_C(t.k > at ? 1 : -1, std::abs(t.k - at));
            at = t.k;
        }
        for (int c = 0; c < std::abs(t.da); ++c) w.push_back(Letter::elementary(a, b, t.da > 0 ? 1 : -1));
        for (int c = 0; c < std::abs(t.dd); ++c) w.push_back(Letter::elementary(d, b, t.dd > 0 ? 1 : -1));
    }
    if (at != 0) step_C(at > 0 ? -1 : 1, std::abs(at));
    return w;
}

std::int64_t shortcut_expansion_length(const Int& x) { return assembled_length(digit_expansion(x)); }

Word lambda_expand(const Word& w, int p) { return lambda_expand_in_block(w, p, 0, p); }

Word lambda_expand_in_block(const Word& w, int p, int lo, int q) {
    Word out(Alphabet::Sigma);
    for (const Letter& l : w.letters()) {
        switch (l.kind) {
        case Letter::Kind::Elementary:
        case Letter::Kind::Diagonal:
            out.push_back(l);
            break;
        case Letter::Kind::Shortcut: {
            Word e = build_shortcut_in_block(l.i, l.j, l.coeff, p, lo, q);
            if (l.sign < 0) e = e.inverse();
            out = out.concat(e);
            break;
        }
        }
    }
    return out;
}

std::int64_t shortcut_length(const Word& w) {
    std::int64_t len = 0;
    for (const Letter& l : w.letters()) {
        if (l.kind == Letter::Kind::Shortcut)
            len += shortcut_expansion_length(l.coeff);
        else
            len += 1;
    }
    return len;
}

std::vector<ShortcutCalibrationRow> calibrate_shortcuts(int max_pow, int random_count,
                                                        std::uint64_t seed) {
    std::vector<ShortcutCalibrationRow> rows;
    auto add = [&](Int x) {
        ShortcutCalibrationRow r;
        r.length = shortcut_expansion_length(x);
        r.ratio = static_cast<double>(r.length) / (1.0 + floor_log2_abs(x));
        r.x = std::move(x);
        rows.push_back(std::move(r));
    };
    for (int k = 0; k <= max_pow; ++k) {
        add(Int(1) << k);
        add(-(Int(1) << k));
    }
    Rng rng(seed);
    for (int t = 0; t < random_count; ++t) add(rng.nonzero_int(64));
    return rows;
}

} // namespace dehnlab
