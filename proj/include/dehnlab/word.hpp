#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dehnlab/errors.hpp"
#include "dehnlab/ints.hpp"
#include "dehnlab/matrix.hpp"

namespace dehnlab {

// One signed letter over Sigma (elementary/diagonal) or SigmaHat (adds
// shortcut letters with an arbitrary nonzero integer coefficient).
// Indices are 0-based internally; the text format is 1-based.
struct Letter {
    enum class Kind : std::uint8_t { Elementary, Diagonal, Shortcut };

    Kind kind = Kind::Elementary;
    std::int8_t sign = 1; // +1 or -1 (formal inverse)
    std::int16_t i = 0, j = 0;
    Int coeff;                  // Shortcut only, != 0
    std::vector<std::int8_t> diag; // Diagonal only, entries +-1 with product +1

    static Letter elementary(int i, int j, int sign = 1) {
        if (i == j) throw ParseError("elementary letter needs i != j");
        Letter l;
        l.kind = Kind::Elementary;
        l.sign = static_cast<std::int8_t>(sign);
        l.i = static_cast<std::int16_t>(i);
        l.j = static_cast<std::int16_t>(j);
        return l;
    }

    static Letter shortcut(int a, int b, Int x, int sign = 1) {
        if (a == b) throw ParseError("shortcut letter needs a != b");
        if (x == 0) throw ParseError("shortcut letter needs x != 0");
        Letter l;
        l.kind = Kind::Shortcut;
        l.sign = static_cast<std::int8_t>(sign);
        l.i = static_cast<std::int16_t>(a);
        l.j = static_cast<std::int16_t>(b);
        l.coeff = std::move(x);
        return l;
    }

    static Letter diagonal(std::vector<std::int8_t> signs, int sign = 1) {
        int prod = 1;
        for (std::int8_t s : signs) {
            if (s != 1 && s != -1) throw ParseError("diagonal entries must be +-1");
            prod *= s;
        }
        if (prod != 1) throw ParseError("diagonal letter must have determinant +1");
        Letter l;
        l.kind = Kind::Diagonal;
        l.sign = static_cast<std::int8_t>(sign);
        l.diag = std::move(signs);
        return l;
    }

    Letter inverse() const {
        Letter l = *this;
        l.sign = static_cast<std::int8_t>(-l.sign);
        return l;
    }

    // signed coefficient that the letter contributes at (i, j)
    Int effective_coeff() const {
        if (kind == Kind::Diagonal) throw PatternMismatch("diagonal letter has no coefficient");
        Int x = (kind == Kind::Elementary) ? Int(1) : coeff;
        return sign > 0 ? x : Int(-x);
    }

    bool same_data(const Letter& o) const {
        return kind == o.kind && i == o.i && j == o.j && coeff == o.coeff && diag == o.diag;
    }
    bool is_formal_inverse_of(const Letter& o) const { return sign == -o.sign && same_data(o); }
    bool operator==(const Letter& o) const { return sign == o.sign && same_data(o); }

    IntMatrix eval(int p) const {
        switch (kind) {
        case Kind::Elementary:
        case Kind::Shortcut: {
            if (i >= p || j >= p) throw DimensionMismatch("letter index out of range");
            return IntMatrix::elementary(p, i, j, effective_coeff());
        }
        case Kind::Diagonal: {
            if (static_cast<int>(diag.size()) != p) throw DimensionMismatch("diagonal letter size");
            std::vector<int> s(diag.begin(), diag.end());
            return IntMatrix::diagonal(s); // involution: sign is irrelevant
        }
        }
        throw Error("unreachable");
    }

    bool is_identity_diagonal() const {
        if (kind != Kind::Diagonal) return false;
        for (std::int8_t s : diag)
            if (s != 1) return false;
        return true;
    }

    std::string str() const;
};

enum class Alphabet : std::uint8_t { Sigma, SigmaHat };

// Immutable-by-convention sequence of letters.  Concatenation and inversion
// return new words; evaluation is the exact product of letter matrices in
// order (matrices act on row vectors on the right).
class Word {
public:
    Word() : alphabet_(Alphabet::SigmaHat) {}
    explicit Word(Alphabet a) : alphabet_(a) {}
    Word(Alphabet a, std::vector<Letter> ls) : alphabet_(a), letters_(std::move(ls)) { check_alphabet(); }

    Alphabet alphabet() const { return alphabet_; }
    const std::vector<Letter>& letters() const { return letters_; }
    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    const Letter& operator[](std::size_t k) const { return letters_[k]; }

    void push_back(Letter l) {
        if (alphabet_ == Alphabet::Sigma && l.kind == Letter::Kind::Shortcut)
            throw ParseError("shortcut letter in a Sigma word");
        letters_.push_back(std::move(l));
    }

    Word concat(const Word& o) const {
        Word w(alphabet_ == Alphabet::Sigma && o.alphabet_ == Alphabet::Sigma ? Alphabet::Sigma
                                                                              : Alphabet::SigmaHat);
        w.letters_ = letters_;
        w.letters_.insert(w.letters_.end(), o.letters_.begin(), o.letters_.end());
        return w;
    }

    Word inverse() const {
        Word w(alphabet_);
        w.letters_.reserve(letters_.size());
        for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(it->inverse());
        return w;
    }

    IntMatrix evaluate(int p) const {
        IntMatrix m = IntMatrix::identity(p);
        for (const Letter& l : letters_) m = m * l.eval(p);
        return m;
    }

    // removes adjacent formal-inverse pairs until none remain
    Word free_reduce() const {
        Word w(alphabet_);
        for (const Letter& l : letters_) {
            if (!w.letters_.empty() && w.letters_.back().is_formal_inverse_of(l))
                w.letters_.pop_back();
            else
                w.letters_.push_back(l);
        }
        return w;
    }

    bool operator==(const Word& o) const { return letters_ == o.letters_; }

    std::string str() const;
    static Word parse(const std::string& line, Alphabet a = Alphabet::SigmaHat);

private:
    void check_alphabet() {
        if (alphabet_ != Alphabet::Sigma) return;
        for (const Letter& l : letters_)
            if (l.kind == Letter::Kind::Shortcut) throw ParseError("shortcut letter in a Sigma word");
    }

    Alphabet alphabet_;
    std::vector<Letter> letters_;
};

// Contiguous block partition of {0..p-1}, stored as block sizes in order.
class BlockPartition {
public:
    BlockPartition() = default;
    explicit BlockPartition(std::vector<int> sizes) : sizes_(std::move(sizes)) {
        starts_.reserve(sizes_.size() + 1);
        int acc = 0;
        for (int s : sizes_) {
            if (s <= 0) throw ParseError("block sizes must be positive");
            starts_.push_back(acc);
            acc += s;
        }
        starts_.push_back(acc);
    }

    int dim() const { return starts_.empty() ? 0 : starts_.back(); }
    int count() const { return static_cast<int>(sizes_.size()); }
    const std::vector<int>& sizes() const { return sizes_; }
    int start(int b) const { return starts_[static_cast<std::size_t>(b)]; }
    int end(int b) const { return starts_[static_cast<std::size_t>(b) + 1]; }

    int block_of(int index) const {
        for (int b = 0; b < count(); ++b)
            if (index < end(b)) return b;
        throw DimensionMismatch("index outside partition");
    }

    bool operator==(const BlockPartition& o) const { return sizes_ == o.sizes_; }

    std::string str() const {
        std::string s = "(";
        for (std::size_t k = 0; k < sizes_.size(); ++k) s += (k ? "," : "") + std::to_string(sizes_[k]);
        return s + ")";
    }

private:
    std::vector<int> sizes_;
    std::vector<int> starts_;
};

// true iff every entry strictly below the block diagonal of part is zero
bool in_block_group(const IntMatrix& g, const BlockPartition& part);

// the finest contiguous partition with g block-upper-triangular
BlockPartition minimal_parabolic(const IntMatrix& g);

} // namespace dehnlab
