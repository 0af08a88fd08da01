#include <doctest.h>

#include "dehnlab/engine.hpp"
#include "dehnlab/normal_form.hpp"
#include "dehnlab/rng.hpp"
#include "dehnlab/shortcuts.hpp"
#include "dehnlab/template.hpp"
#include "oracles.hpp"

using namespace dehnlab;

namespace {

const CostModel kCm;

Word sw(std::initializer_list<Letter> ls) { return Word(Alphabet::SigmaHat, std::vector<Letter>(ls)); }

Letter S(int i, int j, long long x, int sign = 1) { return Letter::shortcut(i, j, Int(x), sign); }

} // namespace

TEST_CASE("normal form of the identity is empty") {
    NormalForm nf = normal_form(IntMatrix::identity(4));
    CHECK(nf.word.empty());
    CHECK(nf.decomposition.reassemble(4) == IntMatrix::identity(4));
}

TEST_CASE("normal form of a single elementary matrix is one letter") {
    NormalForm nf = normal_form(IntMatrix::elementary(4, 0, 2, Int(5)));
    REQUIRE(nf.word.size() == 1);
    CHECK(nf.word[0].kind == Letter::Kind::Shortcut);
    CHECK(nf.word[0].i == 0);
    CHECK(nf.word[0].j == 2);
    CHECK(nf.word[0].coeff == 5);
}

TEST_CASE("normal form reassembles and evaluates exactly") {
    Rng rng(211);
    for (int trial = 0; trial < 400; ++trial) {
        int p = 3 + static_cast<int>(rng.below(3));
        IntMatrix g = testing::random_unimodular(rng, p, 4 + static_cast<int>(rng.below(5)), 12);
        NormalForm nf = normal_form(g);
        CHECK(nf.decomposition.reassemble(p) == g);
        CHECK(nf.word.evaluate(p) == g);
        // length conformance in the expanded metric
        double lhat = static_cast<double>(shortcut_length(nf.word));
        CHECK(lhat <= kNormalFormFactor * (1.0 + g.log2_norm2()));
    }
}

TEST_CASE("normal form respects the minimal parabolic blocks") {
    // block upper-triangular input: every letter stays inside the flag
    Rng rng(223);
    for (int trial = 0; trial < 100; ++trial) {
        const int p = 5;
        IntMatrix a = testing::random_unimodular(rng, 2, 4, 6);
        IntMatrix b = testing::random_unimodular(rng, 3, 4, 6);
        IntMatrix g = IntMatrix::identity(p);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) g(i, j) = a(i, j);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) g(2 + i, 2 + j) = b(i, j);
        g(0, 3) = rng.range(-20, 20);
        g(1, 4) = rng.range(-20, 20);
        if (g.det() != 1) continue;
        NormalForm nf = normal_form(g);
        CHECK(nf.word.evaluate(p) == g);
        BlockPartition part = minimal_parabolic(g);
        for (const Letter& l : nf.word.letters()) {
            if (l.kind == Letter::Kind::Diagonal) continue;
            CHECK(part.block_of(l.i) <= part.block_of(l.j));
        }
    }
}

TEST_CASE("block word on SL(2) blocks") {
    Rng rng(227);
    for (int trial = 0; trial < 300; ++trial) {
        IntMatrix g2 = testing::random_unimodular(rng, 2, 6, 10);
        Word w = rank2_word(g2, 1, 4);
        IntMatrix embedded = IntMatrix::identity(4);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) embedded(1 + i, 1 + j) = g2(i, j);
        CHECK(w.evaluate(4) == embedded);
        for (const Letter& l : w.letters())
            if (l.kind != Letter::Kind::Diagonal) {
                CHECK(l.i >= 1);
                CHECK(l.i <= 2);
                CHECK(l.j >= 1);
                CHECK(l.j <= 2);
            }
    }
}

TEST_CASE("dyadic template shapes") {
    Word w2 = sw({S(0, 1, 3), S(0, 1, -3)});
    Template t2 = dyadic_template(w2, 3);
    CHECK(t2.faces.empty());
    CHECK(t2.bigons.size() == 1);

    Word w4 = sw({S(0, 1, 3), S(1, 2, 2), S(1, 2, -2), S(0, 1, -3)});
    Template t4 = dyadic_template(w4, 3);
    CHECK(t4.faces.size() == 2);
    CHECK(t4.bigons.size() == 1);

    // length 6 pads to 8: 6 triangles and one bigon
    Word w6 = sw({S(0, 1, 1), S(1, 2, 1), S(1, 2, -1), S(0, 1, -1), S(0, 2, 7), S(0, 2, -7)});
    Template t6 = dyadic_template(w6, 3);
    CHECK(t6.faces.size() == 6);
    CHECK(t6.bigons.size() == 1);
    // boundary labels spell the prefixes
    for (std::size_t i = 0; i + 1 < t6.labels.size(); ++i) {
        Word prefix(Alphabet::SigmaHat);
        for (std::size_t k = 0; k < i; ++k)
            if (k < w6.size()) prefix.push_back(w6[k]);
        CHECK(t6.labels[i] == prefix.evaluate(3));
    }
}

TEST_CASE("cone filling boundary conditions") {
    Rng rng(229);
    std::vector<SymmetricPoint> samples;
    IntMatrix acc = IntMatrix::identity(3);
    samples.push_back(point_of(acc));
    Word w(Alphabet::SigmaHat);
    for (int k = 0; k < 5; ++k) {
        w.push_back(Letter::elementary(static_cast<int>(rng.below(2)), 2, rng.coin() ? 1 : -1));
        acc = acc * w[static_cast<std::size_t>(k)].eval(3);
        samples.push_back(point_of(acc));
    }
    ConeFilling cone(samples, 8);
    // top row and the padded columns collapse to the basepoint
    for (int x = 0; x <= 8; ++x) CHECK(dist_E(cone.at(x, 8), point_of(IntMatrix::identity(3))) < 1e-9);
    for (int x = 0; x <= 5; ++x) CHECK(dist_E(cone.at(x, 0), samples[static_cast<std::size_t>(x)]) < 1e-9);
    CHECK(cone.sampled_speed() <= 2.0);
}

TEST_CASE("small template: commutator of disjoint letters at p = 5") {
    Word w = Word::parse("E 1 2 E 3 4 E- 1 2 E- 3 4");
    REQUIRE(w.evaluate(5).is_identity());
    Template tpl = build_template(w, 5);
    TemplateStats st = template_stats(tpl);
    CHECK(st.fallback == 0);
    // the curve stays thick, so nothing should be parabolic either
    CHECK(st.parabolic == 0);
    FillingCertificate cert = fill_template(tpl);
    CHECK(cert.initial == w);
    CHECK(cert.final_word.empty());
    auto rep = verify_certificate(cert, kCm);
    CHECK_MESSAGE(rep.ok, rep.reason, " at move ", rep.move_index);
}

TEST_CASE("template fill on random identity words at p = 5") {
    Rng rng(233);
    for (int trial = 0; trial < 6; ++trial) {
        int half = 3 + static_cast<int>(rng.below(8));
        Word u(Alphabet::Sigma);
        for (int k = 0; k < half; ++k) {
            int i = static_cast<int>(rng.below(5));
            int j = static_cast<int>(rng.below(4));
            if (j >= i) ++j;
            u.push_back(Letter::elementary(i, j, rng.coin() ? 1 : -1));
        }
        Word w = u.concat(u.inverse());
        Template tpl = build_template(w, 5);
        FillingCertificate cert = fill_template(tpl);
        CHECK(cert.final_word.empty());
        auto rep = verify_certificate(cert, kCm);
        CHECK_MESSAGE(rep.ok, rep.reason, " at move ", rep.move_index);
    }
}

TEST_CASE("fill_rank2 basics") {
    // inverse pair
    FillingCertificate c1 = fill_rank2(sw({S(0, 1, 5), S(0, 1, -5)}), 3, kCm);
    CHECK(c1.final_word.empty());
    CHECK(verify_certificate(c1, kCm).ok);

    // braid relation (e01 e10^-1 e01)^4 in the {0,1} block of SL(3;Z)
    Word braid(Alphabet::SigmaHat);
    for (int rep = 0; rep < 4; ++rep) {
        braid.push_back(Letter::elementary(0, 1, 1));
        braid.push_back(Letter::elementary(1, 0, -1));
        braid.push_back(Letter::elementary(0, 1, 1));
    }
    REQUIRE(braid.evaluate(3).is_identity());
    FillingCertificate c2 = fill_rank2(braid, 3, kCm);
    CHECK(c2.final_word.empty());
    auto rep2 = verify_certificate(c2, kCm);
    CHECK_MESSAGE(rep2.ok, rep2.reason, " at move ", rep2.move_index);
}

TEST_CASE("fill_rank2 large coefficients and identity words") {
    Rng rng(239);
    for (int trial = 0; trial < 10; ++trial) {
        // u u^-1 over the block alphabet with mixed letters
        Word u(Alphabet::SigmaHat);
        int len = 1 + static_cast<int>(rng.below(4));
        for (int k = 0; k < len; ++k) {
            switch (rng.below(3)) {
            case 0: u.push_back(S(0, 1, static_cast<long long>(rng.below(1 << 12)) + 2)); break;
            case 1: u.push_back(Letter::elementary(1, 0, rng.coin() ? 1 : -1)); break;
            default: u.push_back(Letter::diagonal({-1, -1, 1})); break;
            }
        }
        Word w = u.concat(u.inverse());
        REQUIRE(w.evaluate(3).is_identity());
        FillingCertificate cert = fill_rank2(w, 3, kCm);
        CHECK(cert.final_word.empty());
        auto rep = verify_certificate(cert, kCm);
        CHECK_MESSAGE(rep.ok, rep.reason, " at move ", rep.move_index);
        // quadratic envelope in the expanded length
        double lhat = static_cast<double>(shortcut_length(w));
        CHECK(cert.total_cost <= kCm.C_Rank2 * lhat * lhat);
    }
}

TEST_CASE("fill_rank2 rejections") {
    CHECK_THROWS_AS(fill_rank2(sw({S(0, 2, 3), S(0, 2, -3)}), 3, kCm), NotRank2);
    CHECK_THROWS_AS(fill_rank2(sw({S(0, 1, 3)}), 3, kCm), NotIdentity);
}

TEST_CASE("deep cusp loop produces parabolic faces at p = 5") {
    // lambda(s_13(2^16)) walked out and back: the cone passes through the
    // cusp, where faces must classify parabolically with exact block tests
    Word shortcut = build_shortcut(0, 2, Int(1) << 16, 5);
    Word w = shortcut.concat(shortcut.inverse());
    Template tpl = build_template(w, 5);
    TemplateStats st = template_stats(tpl);
    CHECK(st.parabolic > 0);
    FillingCertificate cert = fill_template(tpl);
    CHECK(cert.final_word.empty());
    auto rep = verify_certificate(cert, kCm);
    CHECK_MESSAGE(rep.ok, rep.reason, " at move ", rep.move_index);
}
