#include "dehnlab/engine.hpp"

#include <algorithm>
#include <set>

namespace dehnlab {

namespace {

bool is_coeff(const Letter& l) { return l.kind != Letter::Kind::Diagonal; }

// Adjacent coefficient letters [L, R] at q with R required in front of L.
// Emits the Steinberg byproduct when the indices chain.  Returns the new
// position of R:  commute -> [R, L], R at q;  chain L.j == R.i ->
// [E, R, L], R at q+1;  chain R.j == L.i -> [R, E, L], R at q.
std::int64_t pass_left(TranscriptBuilder& tb, std::int64_t q) {
    Letter L = tb.at(static_cast<std::size_t>(q));
    Letter R = tb.at(static_cast<std::size_t>(q) + 1);
    if (!is_coeff(L) || !is_coeff(R)) throw PatternMismatch("pass_left: diagonal letter");
    bool same = (L.i == R.i && L.j == R.j);
    if (same || (L.j != R.i && R.j != L.i)) {
        tb.commute(q);
        return q;
    }
    if (L.j == R.i) {
        // L = (k,a,x), R = (a,b,t):  L R -> E R L with E = (k,b,xt)
        tb.free_insert_block(q + 2, {L.inverse(), R.inverse()});
        tb.multiply(q); // [L, R, L^-1, R^-1] -> E
        return q + 1;
    }
    // R = (a,b,y), L = (b,c,x):  L R -> R E L with E = (a,c,-yx)
    tb.free_insert(q, R);
    tb.free_insert_block(q + 4, {L.inverse()});
    tb.multiply(q + 1); // [R^-1, L, R, L^-1] -> E
    return q;
}

struct Slot {
    int row, col;
};

// canonical row normal form: rows descending, columns ascending
bool slot_before(const Slot& a, const Slot& b) {
    if (a.row != b.row) return a.row > b.row;
    return a.col < b.col;
}

} // namespace

namespace detail {

std::vector<int> word_support(const Word& w, int p) {
    std::set<int> s;
    for (const Letter& l : w.letters()) {
        if (l.kind == Letter::Kind::Diagonal) {
            for (int t = 0; t < static_cast<int>(l.diag.size()); ++t)
                if (l.diag[static_cast<std::size_t>(t)] != 1) s.insert(t);
        } else {
            s.insert(l.i);
            s.insert(l.j);
        }
    }
    (void)p;
    return std::vector<int>(s.begin(), s.end());
}

void triangular_normalize(TranscriptBuilder& tb, std::int64_t begin) {
    for (std::size_t t = static_cast<std::size_t>(begin); t < tb.size(); ++t) {
        const Letter& l = tb.at(t);
        if (!is_coeff(l) || l.i >= l.j) throw NotTriangular("letter not strictly upper");
    }
    // collection: fix the leftmost adjacent violation until none remain
    std::int64_t q = begin;
    while (q + 1 < static_cast<std::int64_t>(tb.size())) {
        const Letter& L = tb.at(static_cast<std::size_t>(q));
        const Letter& R = tb.at(static_cast<std::size_t>(q) + 1);
        Slot sl{L.i, L.j}, sr{R.i, R.j};
        if (sl.row == sr.row && sl.col == sr.col) {
            tb.add_merge(q);
            q = std::max(begin, q - 1);
            continue;
        }
        if (slot_before(sl, sr)) {
            ++q;
            continue;
        }
        pass_left(tb, q);
        q = std::max(begin, q - 1);
    }
}

} // namespace detail

FillingCertificate fill_triangular(const Word& w, int p, const CostModel& cm, std::uint64_t budget) {
    for (const Letter& l : w.letters()) {
        if (l.kind == Letter::Kind::Diagonal || l.i >= l.j)
            throw NotTriangular("fill_triangular: letters must be strictly upper");
        if (l.j >= p) throw DimensionMismatch("letter index out of range");
    }
    if (!w.evaluate(p).is_identity()) throw NotIdentity("fill_triangular: word does not represent I");
    TranscriptBuilder tb(w, p, cm, budget);
    detail::triangular_normalize(tb, 0);
    if (tb.size() != 0) throw Error("triangular sweep left letters behind");
    return tb.take();
}

namespace {

constexpr int kCrossClass = 1 << 20;

// block index for within-block letters, kCrossClass for upper cross letters
int letter_class(const Letter& l, const BlockPartition& part) {
    if (l.kind == Letter::Kind::Diagonal) return -1;
    int bi = part.block_of(l.i), bj = part.block_of(l.j);
    if (bi == bj) return bi;
    if (bi < bj) return kCrossClass;
    throw NotInParabolic("letter crosses blocks downward");
}

} // namespace

ParabolicSplit parabolic_split(const Word& w, const BlockPartition& part, const CostModel& cm,
                               std::uint64_t budget) {
    const int p = part.dim();
    const int k = part.count();
    for (int b = 0; b < k; ++b)
        if (part.sizes()[static_cast<std::size_t>(b)] > p - 2)
            throw BlockTooLarge("parabolic_split: block larger than p-2");
    for (const Letter& l : w.letters()) {
        if (l.kind != Letter::Kind::Diagonal && l.j >= p) throw DimensionMismatch("letter out of range");
        letter_class(l, part); // validates direction
    }

    IntMatrix g = w.evaluate(p);
    if (!in_block_group(g, part)) throw NotInParabolic("evaluation leaves the parabolic");
    for (int b = 0; b < k; ++b)
        for (int i = part.start(b); i < part.end(b); ++i)
            for (int j = part.end(b); j < p; ++j)
                if (g(i, j) != 0)
                    throw NotInParabolic("evaluation has a nontrivial unipotent part");

    TranscriptBuilder tb(w, p, cm, budget);

    // 1. gather all diagonal letters into one front letter
    bool have_diag = false;
    while (true) {
        std::int64_t found = -1;
        for (std::size_t t = have_diag ? 1 : 0; t < tb.size(); ++t)
            if (tb.at(t).kind == Letter::Kind::Diagonal) {
                found = static_cast<std::int64_t>(t);
                break;
            }
        if (found < 0) break;
        std::int64_t at = found;
        std::int64_t stop = have_diag ? 1 : 0;
        while (at > stop) {
            tb.diag_push(at - 1); // [X, d] -> [d, X']
            --at;
        }
        if (have_diag)
            tb.diag_merge(0);
        else
            have_diag = true;
    }
    if (have_diag && tb.at(0).sign < 0) tb.diag_sign(0);
    if (have_diag && tb.at(0).is_identity_diagonal()) {
        tb.diag_drop(0);
        have_diag = false;
    }

    // 2. split the front diagonal into one factor per block
    int diag_count = 0;
    if (have_diag) {
        std::vector<std::int8_t> d = tb.at(0).diag;
        for (int b = 0; b < k - 1; ++b) {
            std::vector<std::int8_t> db(static_cast<std::size_t>(p), 1);
            int neg = 0;
            for (int t = part.start(b); t < part.end(b); ++t) {
                db[static_cast<std::size_t>(t)] = d[static_cast<std::size_t>(t)];
                if (d[static_cast<std::size_t>(t)] < 0) ++neg;
            }
            if (neg % 2 != 0) throw NotInParabolic("diagonal leaves a block determinant -1");
            tb.diag_split(b, Letter::diagonal(db));
        }
        {
            int neg = 0;
            for (int t = part.start(k - 1); t < part.end(k - 1); ++t)
                if (d[static_cast<std::size_t>(t)] < 0) ++neg;
            if (neg % 2 != 0) throw NotInParabolic("diagonal leaves a block determinant -1");
        }
        diag_count = k;
        // drop identity factors, back to front so positions stay valid
        for (int b = k - 1; b >= 0; --b)
            if (tb.at(static_cast<std::size_t>(b)).is_identity_diagonal()) {
                tb.diag_drop(b);
                --diag_count;
            }
    }

    // 3. gather within-block letters, blocks in ascending order
    std::int64_t boundary = diag_count;
    for (int b = 0; b < k; ++b) {
        while (true) {
            std::int64_t found = -1;
            for (std::size_t t = static_cast<std::size_t>(boundary); t < tb.size(); ++t)
                if (letter_class(tb.at(t), part) == b) {
                    found = static_cast<std::int64_t>(t);
                    break;
                }
            if (found < 0) break;
            std::int64_t at = found;
            while (at > boundary) {
                std::int64_t np = pass_left(tb, at - 1);
                at = np;
            }
            ++boundary;
        }
    }

    // 4. interleave the block diagonals in front of their blocks
    if (diag_count > 0) {
        for (std::int64_t di = diag_count - 1; di >= 1; --di) {
            const Letter& d = tb.at(static_cast<std::size_t>(di));
            int db = -1;
            for (int t = 0; t < p; ++t)
                if (d.diag[static_cast<std::size_t>(t)] != 1) {
                    db = part.block_of(t);
                    break;
                }
            std::int64_t at = di;
            while (at + 1 < static_cast<std::int64_t>(tb.size())) {
                const Letter& next = tb.at(static_cast<std::size_t>(at) + 1);
                if (next.kind == Letter::Kind::Diagonal) break;
                int cls = letter_class(next, part);
                if (cls >= db) break; // start of its own block, or the cross tail
                tb.diag_pull(at);
                ++at;
            }
        }
    }

    // 5. normalize away the residual cross tail (it represents I)
    for (std::size_t t = 0; t < tb.size(); ++t) {
        const Letter& l = tb.at(t);
        if (l.kind != Letter::Kind::Diagonal && letter_class(l, part) == kCrossClass) {
            detail::triangular_normalize(tb, static_cast<std::int64_t>(t));
            break;
        }
    }

    ParabolicSplit out;
    out.projections.assign(static_cast<std::size_t>(k), Word(Alphabet::SigmaHat));
    for (std::size_t t = 0; t < tb.size(); ++t) {
        const Letter& l = tb.at(t);
        int b;
        if (l.kind == Letter::Kind::Diagonal) {
            b = -1;
            for (int u = 0; u < p; ++u)
                if (l.diag[static_cast<std::size_t>(u)] != 1) {
                    b = part.block_of(u);
                    break;
                }
            if (b < 0) throw Error("identity diagonal survived the split");
        } else {
            b = letter_class(l, part);
            if (b == kCrossClass) throw Error("cross letter survived the split");
        }
        out.projections[static_cast<std::size_t>(b)].push_back(l);
    }
    out.cert = tb.take();

    for (int b = 0; b < k; ++b) {
        IntMatrix got = out.projections[static_cast<std::size_t>(b)].evaluate(p);
        IntMatrix want = IntMatrix::identity(p);
        for (int i = part.start(b); i < part.end(b); ++i)
            for (int j = part.start(b); j < part.end(b); ++j) want(i, j) = g(i, j);
        if (got != want) throw Error("projection does not match its block");
    }
    return out;
}

FillingCertificate commute_disjoint(const Word& w_S, const Word& w_T, int p, const CostModel& cm,
                                    std::uint64_t budget) {
    std::vector<int> sup_S = detail::word_support(w_S, p);
    std::vector<int> sup_T = detail::word_support(w_T, p);
    if (static_cast<int>(sup_S.size()) > p - 2 || static_cast<int>(sup_T.size()) > p - 2)
        throw BlockTooLarge("commute_disjoint: support larger than p-2");
    std::vector<int> inter;
    std::set_intersection(sup_S.begin(), sup_S.end(), sup_T.begin(), sup_T.end(),
                          std::back_inserter(inter));
    if (!inter.empty()) throw BlocksNotDisjoint("commute_disjoint: supports intersect");

    Word commutator = w_S.concat(w_T).concat(w_S.inverse()).concat(w_T.inverse());
    TranscriptBuilder tb(commutator, p, cm, budget);

    const std::int64_t nS = static_cast<std::int64_t>(w_S.size());
    const std::int64_t nT = static_cast<std::int64_t>(w_T.size());

    // slide each w_T letter right past w_S^-1, last letter first
    for (std::int64_t t = 0; t < nT; ++t) {
        std::int64_t q = nS + nT - 1 - t;
        for (std::int64_t s = 0; s < nS; ++s) {
            const Letter& a = tb.at(static_cast<std::size_t>(q));
            const Letter& b = tb.at(static_cast<std::size_t>(q) + 1);
            bool a_diag = a.kind == Letter::Kind::Diagonal;
            bool b_diag = b.kind == Letter::Kind::Diagonal;
            if (a_diag && b_diag)
                tb.diag_swap(q);
            else if (a_diag)
                tb.diag_pull(q); // [d, X] -> [X, d]; disjoint support keeps X
            else if (b_diag)
                tb.diag_push(q);
            else
                tb.commute(q);
            ++q;
        }
    }
    if (nS > 0) tb.free_delete(0, static_cast<std::int32_t>(nS));
    if (nT > 0) tb.free_delete(0, static_cast<std::int32_t>(nT));
    if (tb.size() != 0) throw Error("commutator did not cancel");
    return tb.take();
}

} // namespace dehnlab
