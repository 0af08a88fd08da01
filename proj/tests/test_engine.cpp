#include <doctest.h>

#include "dehnlab/engine.hpp"
#include "dehnlab/oracle.hpp"
#include "dehnlab/rng.hpp"
#include "dehnlab/shortcuts.hpp"
#include "oracles.hpp"

using namespace dehnlab;

namespace {

const CostModel kCm;

Word sw(std::initializer_list<Letter> ls) { return Word(Alphabet::SigmaHat, std::vector<Letter>(ls)); }

Letter S(int i, int j, long long x, int sign = 1) { return Letter::shortcut(i, j, Int(x), sign); }

} // namespace

TEST_CASE("add move merges adjacent letters") {
    TranscriptBuilder tb(sw({S(0, 1, 3), S(0, 1, 5)}), 3, kCm);
    tb.add_merge(0);
    CHECK(tb.size() == 1);
    CHECK(tb.at(0).coeff == 8);
    auto cert = tb.take();
    CHECK(verify_certificate(cert, kCm).ok);
}

TEST_CASE("add move cancels inverse coefficients") {
    TranscriptBuilder tb(sw({S(0, 1, 7), S(0, 1, -7)}), 3, kCm);
    tb.add_merge(0);
    CHECK(tb.size() == 0);
}

TEST_CASE("multiply move collapses a chained commutator") {
    TranscriptBuilder tb(sw({S(0, 1, 2), S(1, 2, 3), S(0, 1, -2), S(1, 2, -3)}), 3, kCm);
    tb.multiply(0);
    CHECK(tb.size() == 1);
    CHECK(tb.at(0).i == 0);
    CHECK(tb.at(0).j == 2);
    CHECK(tb.at(0).coeff == 6);
    CHECK(verify_certificate(tb.take(), kCm).ok);
}

TEST_CASE("commute move requires the Steinberg condition") {
    TranscriptBuilder tb(sw({S(0, 1, 2), S(2, 3, 5)}), 4, kCm);
    tb.commute(0);
    CHECK(tb.at(0).i == 2);
    TranscriptBuilder bad(sw({S(0, 1, 2), S(1, 2, 5)}), 3, kCm);
    CHECK_THROWS_AS(bad.commute(0), IndexClash);
}

TEST_CASE("swap conjugation matches exact matrix conjugation at p = 5") {
    // validate sigma and tau against g -> s_ij g s_ij^-1 for all patterns
    const int p = 5;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            if (i == j) continue;
            IntMatrix s = IntMatrix::elementary(p, j, i, Int(-1)) * IntMatrix::elementary(p, i, j, Int(1)) *
                          IntMatrix::elementary(p, j, i, Int(-1));
            for (int k = 0; k < p; ++k)
                for (int l = 0; l < p; ++l) {
                    if (k == l) continue;
                    Int x(17);
                    Word w(Alphabet::SigmaHat);
                    w.push_back(Letter::elementary(j, i, -1));
                    w.push_back(Letter::elementary(i, j, 1));
                    w.push_back(Letter::elementary(j, i, -1));
                    w.push_back(Letter::shortcut(k, l, x));
                    w.push_back(Letter::elementary(j, i, 1));
                    w.push_back(Letter::elementary(i, j, -1));
                    w.push_back(Letter::elementary(j, i, 1));
                    TranscriptBuilder tb(w, p, kCm);
                    tb.swap_conj(0, i, j);
                    REQUIRE(tb.size() == 1);
                    IntMatrix got = tb.at(0).eval(p);
                    IntMatrix want = s * IntMatrix::elementary(p, k, l, x) * s.inverse();
                    CHECK(got == want);
                    CHECK(verify_certificate(tb.take(), kCm).ok);
                }
        }
}

TEST_CASE("swap conjugation example") {
    // s_12 s^(13)(4) s_12^-1 -> s^(23)(-4)
    Word w(Alphabet::SigmaHat);
    w.push_back(Letter::elementary(1, 0, -1));
    w.push_back(Letter::elementary(0, 1, 1));
    w.push_back(Letter::elementary(1, 0, -1));
    w.push_back(S(0, 2, 4));
    w.push_back(Letter::elementary(1, 0, 1));
    w.push_back(Letter::elementary(0, 1, -1));
    w.push_back(Letter::elementary(1, 0, 1));
    TranscriptBuilder tb(w, 3, kCm);
    tb.swap_conj(0, 0, 1);
    CHECK(tb.at(0).i == 1);
    CHECK(tb.at(0).j == 2);
    CHECK(tb.at(0).coeff == -4);
}

TEST_CASE("diag push flips the coefficient sign per the entries") {
    Word w(Alphabet::SigmaHat);
    w.push_back(S(0, 1, 9));
    w.push_back(Letter::diagonal({-1, 1, -1}));
    TranscriptBuilder tb(w, 3, kCm);
    tb.diag_push(0);
    CHECK(tb.at(0).kind == Letter::Kind::Diagonal);
    CHECK(tb.at(1).coeff == -9);
    CHECK(verify_certificate(tb.take(), kCm).ok);
}

TEST_CASE("fill_triangular on the worked examples") {
    CHECK(fill_triangular(Word(), 3, kCm).total_cost == 0.0);

    FillingCertificate pairc = fill_triangular(sw({S(0, 1, 7), S(0, 1, -7)}), 3, kCm);
    CHECK(pairc.final_word.empty());
    CHECK(verify_certificate(pairc, kCm).ok);

    FillingCertificate comm =
        fill_triangular(sw({S(0, 1, 2), S(1, 2, 3), S(0, 2, -6), S(1, 2, -3), S(0, 1, -2)}), 3, kCm);
    CHECK(comm.final_word.empty());
    CHECK(verify_certificate(comm, kCm).ok);
}

TEST_CASE("fill_triangular rejections") {
    CHECK_THROWS_AS(fill_triangular(sw({S(1, 0, 2)}), 3, kCm), NotTriangular);
    CHECK_THROWS_AS(fill_triangular(sw({S(0, 1, 2)}), 3, kCm), NotIdentity);
}

TEST_CASE("fill_triangular on random identity words") {
    Rng rng(53);
    for (int trial = 0; trial < 200; ++trial) {
        int p = 3 + static_cast<int>(rng.below(3));
        // u * shuffled inverse-of-u with upper letters only
        Word u(Alphabet::SigmaHat);
        int len = 1 + static_cast<int>(rng.below(8));
        for (int t = 0; t < len; ++t) {
            int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(p - 1)));
            int j = i + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(p - 1 - i)));
            u.push_back(Letter::shortcut(i, j, rng.nonzero_int(16), rng.coin() ? 1 : -1));
        }
        Word w = u.concat(u.inverse());
        FillingCertificate cert = fill_triangular(w, p, kCm);
        CHECK(cert.final_word.empty());
        auto rep = verify_certificate(cert, kCm);
        CHECK_MESSAGE(rep.ok, rep.reason);
        // cost envelope: C_NP n^3 h^2
        double n = static_cast<double>(w.size());
        double h = 1;
        for (const Letter& l : w.letters()) h = std::max(h, barlog(l.coeff));
        CHECK(cert.total_cost <= kCm.C_NP * n * n * n * h * h);
    }
}

TEST_CASE("parabolic_split routes letters to blocks") {
    // spec example: blocks ({1,2},{3,4},{5}) at p = 5
    Word w = sw({S(0, 1, 2), S(2, 3, 3), S(0, 1, -2), S(2, 3, -3)});
    ParabolicSplit ps = parabolic_split(w, BlockPartition({2, 2, 1}), kCm);
    CHECK(ps.projections.size() == 3);
    CHECK(ps.projections[0] == sw({S(0, 1, 2), S(0, 1, -2)}));
    CHECK(ps.projections[1] == sw({S(2, 3, 3), S(2, 3, -3)}));
    CHECK(ps.projections[2].empty());
    CHECK(verify_certificate(ps.cert, kCm).ok);
    // final word is the concatenation of the projections
    Word cat = ps.projections[0].concat(ps.projections[1]).concat(ps.projections[2]);
    CHECK(ps.cert.final_word == cat);
}

TEST_CASE("parabolic_split with a cross-block letter") {
    // the cross letter survives only in the triangular tail, which vanishes
    Word w = sw({S(0, 2, 9), S(0, 1, 1), S(0, 2, -9), S(0, 1, -1)});
    // evaluates to I? e02(9) e01(1) e02(-9) e01(-1): e02 and e01 commute
    REQUIRE(w.evaluate(5).is_identity());
    ParabolicSplit ps = parabolic_split(w, BlockPartition({2, 2, 1}), kCm);
    CHECK(verify_certificate(ps.cert, kCm).ok);
    CHECK(ps.projections[0] == sw({S(0, 1, 1), S(0, 1, -1)}));
    CHECK(ps.projections[1].empty());
}

TEST_CASE("parabolic_split rejections") {
    CHECK_THROWS_AS(parabolic_split(sw({S(0, 1, 2)}), BlockPartition({4, 1}), kCm), BlockTooLarge);
    CHECK_THROWS_AS(parabolic_split(sw({S(2, 0, 2), S(2, 0, -2)}), BlockPartition({2, 2, 1}), kCm),
                    NotInParabolic);
    CHECK_THROWS_AS(parabolic_split(sw({S(0, 2, 2)}), BlockPartition({2, 2, 1}), kCm), NotInParabolic);
}

TEST_CASE("parabolic_split with diagonals and mixed blocks") {
    Rng rng(59);
    for (int trial = 0; trial < 100; ++trial) {
        const int p = 5;
        BlockPartition part({2, 3});
        // random identity word from block letters: u * u^-1 with letters in blocks
        Word u(Alphabet::SigmaHat);
        int len = 1 + static_cast<int>(rng.below(6));
        for (int t = 0; t < len; ++t) {
            switch (rng.below(4)) {
            case 0: u.push_back(Letter::shortcut(0, 1, rng.nonzero_int(10), rng.coin() ? 1 : -1)); break;
            case 1: {
                int i = 2 + static_cast<int>(rng.below(3));
                int j = 2 + static_cast<int>(rng.below(2));
                if (j >= i) ++j;
                u.push_back(Letter::shortcut(i, j, rng.nonzero_int(10), rng.coin() ? 1 : -1));
                break;
            }
            case 2: {
                int a = static_cast<int>(rng.below(2));
                int b = 2 + static_cast<int>(rng.below(3));
                u.push_back(Letter::shortcut(a, b, rng.nonzero_int(10), rng.coin() ? 1 : -1));
                break;
            }
            default:
                u.push_back(Letter::diagonal({-1, -1, 1, 1, 1}, rng.coin() ? 1 : -1));
                break;
            }
        }
        Word w = u.concat(u.inverse());
        REQUIRE(w.evaluate(p).is_identity());
        ParabolicSplit ps = parabolic_split(w, part, kCm);
        auto rep = verify_certificate(ps.cert, kCm);
        CHECK_MESSAGE(rep.ok, rep.reason);
        CHECK(ps.projections[0].evaluate(p).is_identity());
        CHECK(ps.projections[1].evaluate(p).is_identity());
        // cost envelope in the expanded length
        double lhat = static_cast<double>(shortcut_length(w));
        CHECK(ps.cert.total_cost <= kCm.C_Para * lhat * lhat);
    }
}

TEST_CASE("commute_disjoint basics") {
    CHECK(commute_disjoint(Word(), sw({S(2, 3, 5)}), 5, kCm).total_cost == 0.0);

    Word a(Alphabet::SigmaHat), b(Alphabet::SigmaHat);
    a.push_back(Letter::elementary(0, 1, 1));
    b.push_back(Letter::elementary(2, 3, 1));
    FillingCertificate c = commute_disjoint(a, b, 5, kCm);
    CHECK(c.final_word.empty());
    CHECK(verify_certificate(c, kCm).ok);
    // single Commute move plus two free block deletions
    int commutes = 0;
    for (const Move& m : c.moves)
        if (m.kind == MoveKind::Commute) ++commutes;
    CHECK(commutes == 1);
}

TEST_CASE("commute_disjoint big coefficients and envelope") {
    Word a = sw({S(0, 2, 1 << 20)});
    Word b = sw({S(1, 3, 1 << 20)});
    FillingCertificate c = commute_disjoint(a, b, 5, kCm);
    CHECK(verify_certificate(c, kCm).ok);
    double l = static_cast<double>(shortcut_length(a) + shortcut_length(b));
    CHECK(c.total_cost <= kCm.C_Com * l * l);
}

TEST_CASE("commute_disjoint rejections") {
    CHECK_THROWS_AS(commute_disjoint(sw({S(0, 1, 2)}), sw({S(1, 2, 2)}), 5, kCm), BlocksNotDisjoint);
    CHECK_THROWS_AS(commute_disjoint(sw({S(0, 1, 2), S(1, 2, 1), S(2, 3, 1)}), sw({S(4, 5, 2)}), 6, kCm),
                    BlockTooLarge);
}

TEST_CASE("verify_certificate catches tampering") {
    TranscriptBuilder tb(sw({S(0, 1, 3), S(0, 1, 5)}), 3, kCm);
    tb.add_merge(0);
    FillingCertificate cert = tb.take();
    REQUIRE(verify_certificate(cert, kCm).ok);
    FillingCertificate bad = cert;
    bad.final_word = sw({S(0, 1, 9)});
    CHECK_FALSE(verify_certificate(bad, kCm).ok);
    FillingCertificate bad2 = cert;
    bad2.total_cost += 1.0;
    CHECK_FALSE(verify_certificate(bad2, kCm).ok);
    FillingCertificate bad3 = cert;
    bad3.moves[0].pos = 1; // site mismatch
    CHECK_FALSE(verify_certificate(bad3, kCm).ok);
}

TEST_CASE("steinberg oracle fills tiny identity words") {
    // empty word
    Word e(Alphabet::Sigma);
    auto f0 = steinberg_oracle_fill(e);
    REQUIRE(f0.has_value());
    CHECK(f0->relator_count == 0);

    // [e12, e23] e13^-1: one relator
    Word w = Word::parse("E 1 2 E 2 3 E- 1 2 E- 2 3 E- 1 3");
    auto f1 = steinberg_oracle_fill(w);
    REQUIRE(f1.has_value());
    CHECK(f1->relator_count == 1);
    FillingCertificate cert = certificate_from_oracle(w, *f1, 3, kCm);
    CHECK(verify_certificate(cert, kCm).ok);

    // [e13, e12]: commuting relator
    Word w2 = Word::parse("E 1 3 E 1 2 E- 1 3 E- 1 2");
    auto f2 = steinberg_oracle_fill(w2);
    REQUIRE(f2.has_value());
    CHECK(f2->relator_count >= 1);
    CHECK(verify_certificate(certificate_from_oracle(w2, *f2, 3, kCm), kCm).ok);
}

TEST_CASE("oracle handles diagonal letters") {
    Word w = Word::parse("D -1,-1,1 D -1,-1,1");
    auto f = steinberg_oracle_fill(w);
    REQUIRE(f.has_value());
    CHECK(verify_certificate(certificate_from_oracle(w, *f, 3, kCm), kCm).ok);
    Word w2 = Word::parse("D -1,-1,1 E 1 2 D -1,-1,1 E 1 2");
    REQUIRE(w2.evaluate(3).is_identity());
    auto f2 = steinberg_oracle_fill(w2);
    REQUIRE(f2.has_value());
    CHECK(verify_certificate(certificate_from_oracle(w2, *f2, 3, kCm), kCm).ok);
}

TEST_CASE("enumerated identity words of small length") {
    auto words2 = enumerate_identity_words(3, 2, 100000);
    // pairs l l^-1 for 12 signed elementary letters plus d d and d d- pairs
    for (const Word& w : words2) CHECK(w.evaluate(3).is_identity());
    CHECK(words2.size() >= 12);
    auto words4 = enumerate_identity_words(3, 4, 100000);
    for (std::size_t t = 0; t < words4.size(); t += 7) {
        auto f = steinberg_oracle_fill(words4[t]);
        REQUIRE(f.has_value());
        CHECK(verify_certificate(certificate_from_oracle(words4[t], *f, 3, kCm), kCm).ok);
    }
}
