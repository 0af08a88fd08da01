#include "dehnlab/moves.hpp"

#include <algorithm>
#include <cmath>

namespace dehnlab {

GapBuffer::GapBuffer(const Word& w) : buf_(w.letters()), gap_start_(buf_.size()), gap_end_(buf_.size()) {}

void GapBuffer::move_gap(std::size_t pos) {
    if (pos == gap_start_) return;
    if (pos < gap_start_) {
        std::size_t n = gap_start_ - pos;
        std::move_backward(buf_.begin() + static_cast<std::ptrdiff_t>(pos),
                           buf_.begin() + static_cast<std::ptrdiff_t>(gap_start_),
                           buf_.begin() + static_cast<std::ptrdiff_t>(gap_end_));
        gap_start_ -= n;
        gap_end_ -= n;
    } else {
        std::size_t n = pos - gap_start_;
        std::move(buf_.begin() + static_cast<std::ptrdiff_t>(gap_end_),
                  buf_.begin() + static_cast<std::ptrdiff_t>(gap_end_ + n),
                  buf_.begin() + static_cast<std::ptrdiff_t>(gap_start_));
        gap_start_ += n;
        gap_end_ += n;
    }
}

void GapBuffer::replace(std::size_t pos, std::size_t count, const Letter* repl, std::size_t repl_count) {
    if (pos + count > size()) throw PatternMismatch("splice out of range");
    move_gap(pos + count);
    gap_start_ -= count; // deleted letters fall into the gap
    std::size_t gap = gap_end_ - gap_start_;
    if (gap < repl_count) {
        std::size_t tail = buf_.size() - gap_end_;
        std::size_t new_gap = gap + std::max<std::size_t>(repl_count - gap, buf_.size() / 2 + 16);
        std::vector<Letter> nb(gap_start_ + new_gap + tail);
        std::move(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(gap_start_), nb.begin());
        std::move(buf_.begin() + static_cast<std::ptrdiff_t>(gap_end_), buf_.end(),
                  nb.begin() + static_cast<std::ptrdiff_t>(gap_start_ + new_gap));
        buf_ = std::move(nb);
        gap_end_ = gap_start_ + new_gap;
    }
    for (std::size_t t = 0; t < repl_count; ++t) buf_[gap_start_++] = repl[t];
}

Word GapBuffer::to_word(Alphabet a) const {
    Word w(a);
    for (std::size_t t = 0; t < size(); ++t) w.push_back(at(t));
    return w;
}

namespace {

bool is_coeff(const Letter& l) { return l.kind != Letter::Kind::Diagonal; }

double padded_sq(double s, int terms) {
    while (terms < 2) {
        s += 1.0;
        ++terms;
    }
    return s * s;
}

double letter_barlog(const Letter& l) {
    return l.kind == Letter::Kind::Diagonal ? 1.0 : barlog(l.coeff == 0 ? Int(1) : l.coeff);
}

Letter shortcut_eff(int i, int j, Int eff) { return Letter::shortcut(i, j, std::move(eff), 1); }

const MovePayload& need_payload(const Move& m, const std::vector<MovePayload>& ps) {
    if (m.payload == kNoPayload || m.payload >= ps.size()) throw PatternMismatch("move payload missing");
    return ps[m.payload];
}

} // namespace

const char* move_kind_name(MoveKind k) {
    switch (k) {
    case MoveKind::FreeInsertDelete: return "free";
    case MoveKind::Add: return "add";
    case MoveKind::Multiply: return "multiply";
    case MoveKind::Commute: return "commute";
    case MoveKind::SwapConj: return "swap_conj";
    case MoveKind::DiagConj: return "diag_conj";
    case MoveKind::ShortEquiv: return "short_equiv";
    }
    return "?";
}

double apply_move(GapBuffer& w, const Move& m, const std::vector<MovePayload>& payloads, int p,
                  const CostModel& cm) {
    const std::size_t pos = static_cast<std::size_t>(m.pos);
    auto site = [&](std::size_t off) -> const Letter& {
        if (pos + off >= w.size()) throw PatternMismatch("site past end of word");
        return w.at(pos + off);
    };

    switch (m.kind) {
    case MoveKind::FreeInsertDelete: {
        // block form: insert or delete u u^-1 for a subword u
        if (m.dir > 0) {
            const MovePayload& pl = need_payload(m, payloads);
            const std::vector<Letter>& u = pl.letters;
            if (u.empty()) throw PatternMismatch("free insert needs letters");
            if (pos > w.size()) throw PatternMismatch("insert past end");
            std::vector<Letter> block(u);
            for (auto it = u.rbegin(); it != u.rend(); ++it) block.push_back(it->inverse());
            w.insert(pos, block.data(), block.size());
        } else {
            std::size_t n = static_cast<std::size_t>(m.len);
            if (n == 0) throw PatternMismatch("free delete needs a block length");
            if (pos + 2 * n > w.size()) throw PatternMismatch("free delete past end");
            for (std::size_t t = 0; t < n; ++t)
                if (!site(n + t).is_formal_inverse_of(site(n - 1 - t)))
                    throw PatternMismatch("free delete: not an inverse block");
            w.erase(pos, 2 * n);
        }
        return 0.0;
    }

    case MoveKind::Add: {
        if (m.sub == kAddMerge) {
            if (m.dir > 0) {
                const Letter &a = site(0), &b = site(1);
                if (!is_coeff(a) || !is_coeff(b) || a.i != b.i || a.j != b.j)
                    throw PatternMismatch("add: need adjacent letters at one position");
                Int x = a.effective_coeff(), y = b.effective_coeff();
                double cost = cm.C_Add * padded_sq(barlog(x) + barlog(y), 2);
                Int z = x + y;
                if (z == 0) {
                    w.erase(pos, 2);
                } else {
                    Letter r = shortcut_eff(a.i, a.j, z);
                    w.replace(pos, 2, &r, 1);
                }
                return cost;
            }
            // reverse: split one letter by the recorded parts
            const MovePayload& pl = need_payload(m, payloads);
            if (pl.x == 0 || pl.y == 0) throw PatternMismatch("add split: zero part");
            if (pos == w.size() && pl.x + pl.y == 0) {
                // split of the empty replacement: insert an inverse pair
                Letter parts[2] = {shortcut_eff(m.i, m.j, pl.x), shortcut_eff(m.i, m.j, pl.y)};
                w.insert(pos, parts, 2);
                return cm.C_Add * padded_sq(barlog(pl.x) + barlog(pl.y), 2);
            }
            const Letter& a = site(0);
            if (!is_coeff(a)) throw PatternMismatch("add split: diagonal site");
            if (a.effective_coeff() != pl.x + pl.y) throw PatternMismatch("add split: parts do not sum");
            Letter parts[2] = {shortcut_eff(a.i, a.j, pl.x), shortcut_eff(a.i, a.j, pl.y)};
            w.replace(pos, 1, parts, 2);
            return cm.C_Add * padded_sq(barlog(pl.x) + barlog(pl.y), 2);
        }
        if (m.sub == kAddNormalizeSign) {
            const Letter& a = site(0);
            if (a.kind != Letter::Kind::Shortcut) throw PatternMismatch("sign normalization needs a shortcut letter");
            if (m.dir > 0) {
                if (a.sign >= 0) throw PatternMismatch("sign normalization: letter already positive");
                Letter r = shortcut_eff(a.i, a.j, a.effective_coeff());
                w.replace(pos, 1, &r, 1);
            } else {
                if (a.sign < 0) throw PatternMismatch("sign denormalization: letter already negative");
                Letter r = Letter::shortcut(a.i, a.j, -a.coeff, -1);
                w.replace(pos, 1, &r, 1);
            }
            return cm.C_Add * padded_sq(barlog(a.coeff), 1);
        }
        throw PatternMismatch("unknown add variant");
    }

    case MoveKind::Multiply: {
        if (m.dir > 0) {
            const Letter &a = site(0), &b = site(1), &c = site(2), &d = site(3);
            if (!is_coeff(a) || !is_coeff(b) || !is_coeff(c) || !is_coeff(d))
                throw PatternMismatch("multiply: diagonal letter in commutator site");
            if (a.j != b.i || a.i == b.j) throw IndexClash("multiply: need chain i->j->k with i != k");
            if (c.i != a.i || c.j != a.j || d.i != b.i || d.j != b.j)
                throw PatternMismatch("multiply: not a commutator");
            Int x = a.effective_coeff(), y = b.effective_coeff();
            if (c.effective_coeff() != -x || d.effective_coeff() != -y)
                throw PatternMismatch("multiply: inverses do not match");
            Letter r = shortcut_eff(a.i, b.j, x * y);
            w.replace(pos, 4, &r, 1);
            return cm.C_Mul * padded_sq(barlog(x) + barlog(y), 2);
        }
        // reverse: expand s_ik(z) into [s_ij(x), s_jk(y)] with xy = z
        const MovePayload& pl = need_payload(m, payloads);
        const Letter& z = site(0);
        if (!is_coeff(z)) throw PatternMismatch("multiply expand: diagonal site");
        if (pl.x == 0 || pl.y == 0 || pl.x * pl.y != z.effective_coeff())
            throw PatternMismatch("multiply expand: bad factorization");
        int i = z.i, k = z.j, j = m.j;
        if (j == i || j == k || j < 0 || j >= p) throw IndexClash("multiply expand: bad middle index");
        Letter parts[4] = {shortcut_eff(i, j, pl.x), shortcut_eff(j, k, pl.y),
                           shortcut_eff(i, j, -pl.x), shortcut_eff(j, k, -pl.y)};
        w.replace(pos, 1, parts, 4);
        return cm.C_Mul * padded_sq(barlog(pl.x) + barlog(pl.y), 2);
    }

    case MoveKind::Commute: {
        const Letter &a = site(0), &b = site(1);
        if (!is_coeff(a) || !is_coeff(b)) throw PatternMismatch("commute: diagonal letter");
        bool same = (a.i == b.i && a.j == b.j);
        if (!same && (a.j == b.i || b.j == a.i))
            throw IndexClash("commute: letters do not commute");
        Letter swapped[2] = {b, a};
        w.replace(pos, 2, swapped, 2);
        return cm.C_Com * padded_sq(barlog(a.kind == Letter::Kind::Shortcut ? a.coeff : Int(1)) +
                                        barlog(b.kind == Letter::Kind::Shortcut ? b.coeff : Int(1)),
                                    2);
    }

    case MoveKind::SwapConj: {
        const int i = m.i, j = m.j;
        if (i == j || i < 0 || j < 0 || i >= p || j >= p) throw IndexClash("swap_conj: bad (i, j)");
        auto is_elem = [&](const Letter& l, int a, int b, int sign) {
            return l.kind == Letter::Kind::Elementary && l.i == a && l.j == b && l.sign == sign;
        };
        auto sigma = [&](int t) { return t == i ? j : (t == j ? i : t); };
        if (m.dir > 0) {
            // s_ij X s_ij^-1 -> X', with s_ij = e_ji^-1 e_ij e_ji^-1
            if (!is_elem(site(0), j, i, -1) || !is_elem(site(1), i, j, 1) || !is_elem(site(2), j, i, -1) ||
                !is_elem(site(4), j, i, 1) || !is_elem(site(5), i, j, -1) || !is_elem(site(6), j, i, 1))
                throw PatternMismatch("swap_conj: conjugator letters do not match");
            const Letter& x = site(3);
            if (!is_coeff(x)) throw PatternMismatch("swap_conj: diagonal inner letter");
            int tau = (x.i == i || x.j == i) ? -1 : 1;
            Letter r = shortcut_eff(sigma(x.i), sigma(x.j), tau * x.effective_coeff());
            w.replace(pos, 7, &r, 1);
            return cm.C_Swap * padded_sq(barlog(x.effective_coeff()), 1);
        }
        // reverse: wrap X's preimage in the conjugator
        const Letter& x = site(0);
        if (!is_coeff(x)) throw PatternMismatch("swap_conj: diagonal inner letter");
        int ki = sigma(x.i), li = sigma(x.j);
        int tau = (ki == i || li == i) ? -1 : 1;
        Letter parts[7] = {Letter::elementary(j, i, -1), Letter::elementary(i, j, 1),
                           Letter::elementary(j, i, -1), shortcut_eff(ki, li, tau * x.effective_coeff()),
                           Letter::elementary(j, i, 1),  Letter::elementary(i, j, -1),
                           Letter::elementary(j, i, 1)};
        w.replace(pos, 1, parts, 7);
        return cm.C_Swap * padded_sq(barlog(x.effective_coeff()), 1);
    }

    case MoveKind::DiagConj: {
        auto diag_at = [&](std::size_t off) -> const Letter& {
            const Letter& l = site(off);
            if (l.kind != Letter::Kind::Diagonal) throw PatternMismatch("diag move: letter not diagonal");
            if (static_cast<int>(l.diag.size()) != p) throw DimensionMismatch("diag letter size");
            return l;
        };
        switch (m.sub) {
        case kDiagPush: {
            // forward: [X, d] -> [d, X']; reverse: [d, X] -> [X', d]
            std::size_t xoff = m.dir > 0 ? 0 : 1, doff = 1 - xoff;
            const Letter& d = diag_at(doff);
            const Letter& x = site(xoff);
            if (!is_coeff(x)) throw PatternMismatch("diag push: inner letter not coefficient kind");
            int ee = d.diag[static_cast<std::size_t>(x.i)] * d.diag[static_cast<std::size_t>(x.j)];
            Letter xp = x;
            if (ee < 0) {
                if (xp.kind == Letter::Kind::Elementary)
                    xp.sign = static_cast<std::int8_t>(-xp.sign);
                else
                    xp.coeff = -xp.coeff;
            }
            Letter out[2];
            if (m.dir > 0) {
                out[0] = d;
                out[1] = xp;
            } else {
                out[0] = xp;
                out[1] = d;
            }
            w.replace(pos, 2, out, 2);
            return cm.C_Diag * padded_sq(letter_barlog(x), 1);
        }
        case kDiagMerge: {
            const Letter &d1 = diag_at(0), &d2 = diag_at(1);
            std::vector<std::int8_t> prod(d1.diag);
            for (std::size_t t = 0; t < prod.size(); ++t) prod[t] = static_cast<std::int8_t>(prod[t] * d2.diag[t]);
            Letter r = Letter::diagonal(std::move(prod));
            w.replace(pos, 2, &r, 1);
            return cm.C_Diag * padded_sq(0.0, 0);
        }
        case kDiagSplit: {
            const MovePayload& pl = need_payload(m, payloads);
            if (pl.letters.size() != 1 || pl.letters[0].kind != Letter::Kind::Diagonal)
                throw PatternMismatch("diag split: payload must be one diagonal letter");
            const Letter& d = diag_at(0);
            Letter d1 = pl.letters[0];
            std::vector<std::int8_t> rest(d.diag);
            for (std::size_t t = 0; t < rest.size(); ++t) rest[t] = static_cast<std::int8_t>(rest[t] * d1.diag[t]);
            Letter out[2] = {d1, Letter::diagonal(std::move(rest))};
            w.replace(pos, 1, out, 2);
            return cm.C_Diag * padded_sq(0.0, 0);
        }
        case kDiagDrop: {
            const Letter& d = diag_at(0);
            if (!d.is_identity_diagonal()) throw PatternMismatch("diag drop: not the identity letter");
            w.erase(pos, 1);
            return cm.C_Diag * padded_sq(0.0, 0);
        }
        case kDiagInsert: {
            Letter r = Letter::diagonal(std::vector<std::int8_t>(static_cast<std::size_t>(p), 1));
            w.insert(pos, &r, 1);
            return cm.C_Diag * padded_sq(0.0, 0);
        }
        case kDiagSign: {
            const Letter& d = diag_at(0);
            if (d.sign >= 0 && m.dir > 0) throw PatternMismatch("diag sign: already positive");
            Letter r = d;
            r.sign = static_cast<std::int8_t>(-r.sign);
            w.replace(pos, 1, &r, 1);
            return cm.C_Diag * padded_sq(0.0, 0);
        }
        case kDiagSwap: {
            const Letter &d1 = diag_at(0), &d2 = diag_at(1);
            Letter out[2] = {d2, d1};
            w.replace(pos, 2, out, 2);
            return cm.C_Diag * padded_sq(0.0, 0);
        }
        default: throw PatternMismatch("unknown diag variant");
        }
    }

    case MoveKind::ShortEquiv: {
        const MovePayload& pl = need_payload(m, payloads);
        const std::vector<Letter>& from = (m.dir > 0) ? pl.letters2 : pl.letters;
        const std::vector<Letter>& to = (m.dir > 0) ? pl.letters : pl.letters2;
        std::size_t n = from.size();
        if (pos + n > w.size()) throw PatternMismatch("short_equiv: site out of range");
        for (std::size_t t = 0; t < n; ++t)
            if (!(w.at(pos + t) == from[t])) throw PatternMismatch("short_equiv: site letters differ");
        // the axiom: exact evaluation invariance, checked on every application
        IntMatrix before = IntMatrix::identity(p), after = IntMatrix::identity(p);
        for (const Letter& l : from) before = before * l.eval(p);
        for (const Letter& l : to) after = after * l.eval(p);
        if (before != after) throw PatternMismatch("short_equiv: evaluation changed");
        w.replace(pos, n, to.data(), to.size());
        double s = 0.0;
        for (const Letter& l : from) s += letter_barlog(l);
        for (const Letter& l : to) s += letter_barlog(l);
        return cm.C_ShortEquiv * padded_sq(s, static_cast<int>(from.size() + to.size()));
    }
    }
    throw PatternMismatch("unknown move kind");
}

} // namespace dehnlab
