#include <doctest.h>

#include "dehnlab/rng.hpp"
#include "dehnlab/shortcuts.hpp"
#include "oracles.hpp"

using namespace dehnlab;

TEST_CASE("coefficient one gives the single generator") {
    Word w = build_shortcut(0, 1, Int(1), 3);
    CHECK(w.size() == 1);
    CHECK(w[0].kind == Letter::Kind::Elementary);
    CHECK(w[0].i == 0);
    CHECK(w[0].j == 1);
}

TEST_CASE("exactness on powers of two") {
    for (int k = 0; k <= 41; ++k) {
        Int x = Int(1) << k;
        Word w = build_shortcut(0, 2, x, 3);
        CHECK(w.evaluate(3) == IntMatrix::elementary(3, 0, 2, x));
        CHECK(static_cast<double>(w.size()) <= kShortcutLengthFactor * (1 + k));
    }
    Word w = build_shortcut(0, 2, Int(1024), 3);
    CHECK(w.evaluate(3) == IntMatrix::elementary(3, 0, 2, Int(1024)));
}

TEST_CASE("exactness and length on random coefficients") {
    Rng rng(31);
    for (int trial = 0; trial < 400; ++trial) {
        Int x = rng.nonzero_int(64);
        int p = 3 + static_cast<int>(rng.below(3));
        int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
        int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(p - 1)));
        if (b >= a) ++b;
        Word w = build_shortcut(a, b, x, p);
        CHECK(w.evaluate(p) == IntMatrix::elementary(p, a, b, x));
        CHECK(static_cast<double>(w.size()) <= kShortcutLengthFactor * (1 + floor_log2_abs(x)));
        CHECK(w.alphabet() == Alphabet::Sigma);
    }
    // example from the calibration range
    Word w = build_shortcut(1, 0, Int(-6), 4);
    CHECK(w.evaluate(4) == IntMatrix::elementary(4, 1, 0, Int(-6)));
    CHECK(static_cast<double>(w.size()) <= kShortcutLengthFactor * 3);
}

TEST_CASE("rejections") {
    CHECK_THROWS_AS(build_shortcut(0, 1, Int(5), 2), DimensionMismatch);
    CHECK_THROWS_AS(build_shortcut(0, 1, Int(0), 3), ParseError);
    CHECK_THROWS_AS(build_shortcut(1, 1, Int(2), 3), IndexClash);
}

TEST_CASE("determinism") {
    for (int rep = 0; rep < 3; ++rep) {
        Word a = build_shortcut(0, 2, Int("123456789123456789"), 4);
        Word b = build_shortcut(0, 2, Int("123456789123456789"), 4);
        CHECK(a == b);
    }
}

TEST_CASE("lambda expansion preserves evaluation") {
    CHECK(lambda_expand(Word(), 3).empty());
    Word single(Alphabet::SigmaHat);
    single.push_back(Letter::shortcut(0, 1, Int(1)));
    Word ex = lambda_expand(single, 3);
    CHECK(ex.size() == 1);
    CHECK(ex[0].kind == Letter::Kind::Elementary);

    Word pair(Alphabet::SigmaHat);
    pair.push_back(Letter::shortcut(0, 2, Int(20)));
    pair.push_back(Letter::shortcut(0, 2, Int(-20)));
    CHECK(lambda_expand(pair, 3).evaluate(3).is_identity());

    Rng rng(37);
    for (int trial = 0; trial < 500; ++trial) {
        int p = 3 + static_cast<int>(rng.below(3));
        Word w = testing::random_word(rng, p, 1 + static_cast<int>(rng.below(5)), 64);
        Word e = lambda_expand(w, p);
        CHECK(e.evaluate(p) == w.evaluate(p));
        CHECK(static_cast<std::int64_t>(e.size()) == shortcut_length(w));
    }
}

TEST_CASE("expanded length basics") {
    CHECK(shortcut_length(Word()) == 0);
    Word e(Alphabet::Sigma);
    e.push_back(Letter::elementary(0, 1, 1));
    CHECK(shortcut_length(e) == 1);
}

TEST_CASE("affine growth along doubling coefficients") {
    std::int64_t prev = shortcut_expansion_length(Int(1));
    std::int64_t max_step = 0;
    for (int k = 1; k <= 41; ++k) {
        std::int64_t len = shortcut_expansion_length(Int(1) << k);
        max_step = std::max(max_step, len - prev);
        prev = len;
    }
    // measured during calibration; 24 ships as the step constant
    CHECK(max_step <= 24);
}

TEST_CASE("calibration table") {
    auto rows = calibrate_shortcuts(20, 50, 99);
    CHECK(rows.size() == 2 * 21 + 50);
    for (const auto& r : rows) {
        CHECK(r.ratio <= kShortcutLengthFactor);
        CHECK(r.length >= 1);
    }
}
