#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dehnlab/errors.hpp"
#include "dehnlab/ints.hpp"

namespace dehnlab {

// Exact p x p integer matrix.  Group elements always have determinant 1;
// the unchecked constructor is used for intermediate products.
class IntMatrix {
public:
    IntMatrix() : p_(0) {}
    explicit IntMatrix(int p) : p_(p), a_(static_cast<std::size_t>(p) * p, Int(0)) {}

    static IntMatrix identity(int p) {
        IntMatrix m(p);
        for (int i = 0; i < p; ++i) m(i, i) = 1;
        return m;
    }

    // identity with entry x at (i, j); 0-based indices
    static IntMatrix elementary(int p, int i, int j, const Int& x) {
        if (i == j || i < 0 || j < 0 || i >= p || j >= p) throw IndexClash("elementary: bad indices");
        IntMatrix m = identity(p);
        m(i, j) = x;
        return m;
    }

    static IntMatrix diagonal(const std::vector<int>& signs) {
        IntMatrix m(static_cast<int>(signs.size()));
        for (int i = 0; i < m.p_; ++i) m(i, i) = signs[static_cast<std::size_t>(i)];
        return m;
    }

    int dim() const { return p_; }

    Int& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * p_ + j]; }
    const Int& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * p_ + j]; }

    bool operator==(const IntMatrix& o) const { return p_ == o.p_ && a_ == o.a_; }
    bool operator!=(const IntMatrix& o) const { return !(*this == o); }

    bool is_identity() const {
        for (int i = 0; i < p_; ++i)
            for (int j = 0; j < p_; ++j)
                if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
        return true;
    }

    IntMatrix operator*(const IntMatrix& o) const {
        if (p_ != o.p_) throw DimensionMismatch("matrix product dims");
        IntMatrix r(p_);
        for (int i = 0; i < p_; ++i)
            for (int k = 0; k < p_; ++k) {
                const Int& x = (*this)(i, k);
                if (x == 0) continue;
                for (int j = 0; j < p_; ++j) {
                    const Int& y = o(k, j);
                    if (y != 0) r(i, j) += x * y;
                }
            }
        return r;
    }

    IntMatrix transpose() const {
        IntMatrix r(p_);
        for (int i = 0; i < p_; ++i)
            for (int j = 0; j < p_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    // fraction-free Gaussian elimination (Bareiss)
    Int det() const {
        if (p_ == 0) return 1;
        IntMatrix m = *this;
        Int prev = 1;
        int sign = 1;
        for (int k = 0; k < p_ - 1; ++k) {
            if (m(k, k) == 0) {
                int piv = -1;
                for (int i = k + 1; i < p_; ++i)
                    if (m(i, k) != 0) { piv = i; break; }
                if (piv < 0) return 0;
                for (int j = 0; j < p_; ++j) std::swap(m(k, j), m(piv, j));
                sign = -sign;
            }
            for (int i = k + 1; i < p_; ++i)
                for (int j = k + 1; j < p_; ++j) {
                    m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
                }
            prev = m(k, k);
        }
        return sign > 0 ? m(p_ - 1, p_ - 1) : -m(p_ - 1, p_ - 1);
    }

    // exact inverse; requires det == +-1
    IntMatrix inverse() const {
        Int d = det();
        if (d != 1 && d != -1) throw NotUnimodular("inverse: det not +-1");
        IntMatrix adj(p_);
        for (int i = 0; i < p_; ++i)
            for (int j = 0; j < p_; ++j) {
                Int c = cofactor(j, i);
                adj(i, j) = (d == 1) ? c : -c;
            }
        return adj;
    }

    Int norm_inf() const {
        Int m = 0;
        for (const Int& x : a_) {
            Int ax = boost::multiprecision::abs(x);
            if (ax > m) m = ax;
        }
        return m;
    }

    double norm2() const {
        // exact sum of squares, then sqrt in double
        Int s = 0;
        for (const Int& x : a_) s += x * x;
        return std::sqrt(to_double(s));
    }

    Int norm2_squared() const {
        Int s = 0;
        for (const Int& x : a_) s += x * x;
        return s;
    }

    double log2_norm2() const {
        Int s = norm2_squared();
        return 0.5 * barlog(s);
    }

    std::string str() const {
        std::string out = "[";
        for (int i = 0; i < p_; ++i) {
            out += (i ? "; " : "");
            for (int j = 0; j < p_; ++j) out += (j ? "," : "") + (*this)(i, j).str();
        }
        return out + "]";
    }

private:
    Int cofactor(int i, int j) const {
        IntMatrix m(p_ - 1);
        for (int r = 0, rr = 0; r < p_; ++r) {
            if (r == i) continue;
            for (int c = 0, cc = 0; c < p_; ++c) {
                if (c == j) continue;
                m(rr, cc) = (*this)(r, c);
                ++cc;
            }
            ++rr;
        }
        Int d = m.det();
        return ((i + j) % 2 == 0) ? d : -d;
    }

    int p_;
    std::vector<Int> a_;
};

} // namespace dehnlab
