#include "dehnlab/symspace.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dehnlab/errors.hpp"

#ifdef DEHNLAB_HAVE_OPENMP
#include <omp.h>
#endif

namespace dehnlab {

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

double GeometryConstants::flag_window_slack(int p) const {
    return std::log(std::sqrt(static_cast<double>(p))) - p * std::log(eps_siegel);
}

double GeometryConstants::witness_threshold(int p) const {
    return phi_slack + flag_window_slack(p) + witness_margin;
}

namespace {

// dyadic fixed-point scalar: value = v * 2^e
struct Fx {
    Int v;
    int e = 0;
};

Fx fx_of_double(double d) {
    if (d == 0.0) return Fx{Int(0), 0};
    int e;
    double m = std::frexp(d, &e);
    return Fx{Int(llround(std::ldexp(m, 53))), e - 53};
}

Fx fx_mul(const Fx& a, const Fx& b) { return Fx{a.v * b.v, a.e + b.e}; }

void fx_add_into(Fx& acc, const Fx& x) {
    if (x.v == 0) return;
    if (acc.v == 0) {
        acc = x;
        return;
    }
    int e = std::min(acc.e, x.e);
    acc.v <<= (acc.e - e);
    Int xv = x.v << (x.e - e);
    acc.v += xv;
    acc.e = e;
}

} // namespace

namespace {

long double log_of_int(const Int& x) {
    Int a = boost::multiprecision::abs(x);
    if (a == 0) throw Error("log of zero");
    int bits = bit_length(a);
    if (bits <= 63) return logl(static_cast<long double>(static_cast<long long>(a)));
    Int top = a >> (bits - 63);
    return logl(static_cast<long double>(static_cast<long long>(top))) +
           static_cast<long double>(bits - 63) * 0.69314718055994530942L;
}

// exact determinant of an integer matrix given as rows (Bareiss)
Int det_of_rows(std::vector<std::vector<Int>> m) {
    const int p = static_cast<int>(m.size());
    if (p == 0) return 1;
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k < p - 1; ++k) {
        if (m[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] == 0) {
            int piv = -1;
            for (int i = k + 1; i < p; ++i)
                if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] != 0) {
                    piv = i;
                    break;
                }
            if (piv < 0) return 0;
            std::swap(m[static_cast<std::size_t>(k)], m[static_cast<std::size_t>(piv)]);
            sign = -sign;
        }
        for (int i = k + 1; i < p; ++i)
            for (int j = k + 1; j < p; ++j)
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                         m[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] -
                     m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                         m[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]) /
                    prev;
        prev = m[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
    }
    Int d = m[static_cast<std::size_t>(p) - 1][static_cast<std::size_t>(p) - 1];
    return sign > 0 ? d : -d;
}

} // namespace

long double ExactGram::entry(int i, int j) const {
    const Int& v = num[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    if (v == 0) return 0.0L;
    Int a = boost::multiprecision::abs(v);
    int bits = bit_length(a);
    long double m;
    if (bits <= 63) {
        m = static_cast<long double>(static_cast<long long>(a));
        m = ldexpl(m, exp2);
    } else {
        Int top = a >> (bits - 63);
        m = ldexpl(static_cast<long double>(static_cast<long long>(top)), bits - 63 + exp2);
    }
    return v < 0 ? -m : m;
}

ExactGram exact_gram_of_rows(const std::vector<std::vector<double>>& rows) {
    const int p = static_cast<int>(rows.size());
    std::vector<std::vector<Fx>> fx(static_cast<std::size_t>(p), std::vector<Fx>(static_cast<std::size_t>(p)));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) fx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            fx_of_double(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    std::vector<std::vector<Fx>> g(static_cast<std::size_t>(p), std::vector<Fx>(static_cast<std::size_t>(p)));
    int emin = 0;
    bool any = false;
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            Fx acc{Int(0), 0};
            for (int k = 0; k < p; ++k)
                fx_add_into(acc, fx_mul(fx[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                                        fx[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]));
            g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc;
            if (acc.v != 0) {
                if (!any || acc.e < emin) emin = acc.e;
                any = true;
            }
        }
    ExactGram out;
    out.exp2 = any ? emin : 0;
    out.num.assign(static_cast<std::size_t>(p), std::vector<Int>(static_cast<std::size_t>(p), Int(0)));
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            Fx& c = g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            Int v = c.v;
            if (v != 0) v <<= (c.e - out.exp2);
            out.num[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            out.num[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                out.num[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    return out;
}

namespace {

Eigen::MatrixXd mirror_of_exact(const ExactGram& eg) {
    const int p = eg.dim();
    Eigen::MatrixXd q(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) q(i, j) = static_cast<double>(eg.entry(i, j));
    return q;
}

// normalize the double mirror so its determinant is 1 (metric use only)
void normalize_mirror(Eigen::MatrixXd& q) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) return;
    double logdet = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        double ev = es.eigenvalues()(i);
        if (ev <= 0) return; // deep point: mirror is only a coarse shadow
        logdet += std::log(ev);
    }
    q *= std::exp(-logdet / static_cast<double>(q.rows()));
}

} // namespace

SymmetricPoint point_of_exact(ExactGram eg) {
    SymmetricPoint out;
    out.p = eg.dim();
    out.gram = mirror_of_exact(eg);
    normalize_mirror(out.gram);
    out.exact = std::move(eg);
    return out;
}

SymmetricPoint point_of(const Eigen::MatrixXd& g) {
    const int p = static_cast<int>(g.rows());
    if (g.cols() != p || p < 2) throw DimensionMismatch("point_of: square matrix needed");
    double det = g.determinant();
    if (std::abs(std::abs(det) - 1.0) > 1e-6 * std::max(1.0, std::abs(det)))
        throw Singular("point_of: determinant not +-1");
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(p),
                                          std::vector<double>(static_cast<std::size_t>(p)));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g(i, j);
    return point_of_exact(exact_gram_of_rows(rows));
}

SymmetricPoint point_of(const IntMatrix& g) {
    if (g.det() != 1) throw Singular("point_of: integer matrix must have det 1");
    const int p = g.dim();
    ExactGram eg;
    eg.exp2 = 0;
    eg.num.assign(static_cast<std::size_t>(p), std::vector<Int>(static_cast<std::size_t>(p), Int(0)));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            Int s = 0;
            for (int k = 0; k < p; ++k) s += g(i, k) * g(j, k);
            eg.num[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(s);
        }
    return point_of_exact(std::move(eg));
}

SymmetricPoint translate(const IntMatrix& g, const SymmetricPoint& x) {
    const int p = x.p;
    ExactGram eg;
    eg.exp2 = x.exact.exp2;
    eg.num.assign(static_cast<std::size_t>(p), std::vector<Int>(static_cast<std::size_t>(p), Int(0)));
    // g Q g^T exactly
    std::vector<std::vector<Int>> tmp(static_cast<std::size_t>(p),
                                      std::vector<Int>(static_cast<std::size_t>(p), Int(0)));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            Int s = 0;
            for (int k = 0; k < p; ++k)
                s += g(i, k) * x.exact.num[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            tmp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(s);
        }
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            Int s = 0;
            for (int k = 0; k < p; ++k) s += tmp[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * g(j, k);
            eg.num[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(s);
        }
    return point_of_exact(std::move(eg));
}

namespace {

Eigen::VectorXd log_spectrum(const SymmetricPoint& x, const SymmetricPoint& y) {
    if (x.p != y.p) throw DimensionMismatch("points of different dimension");
    LMatrix a(x.p, x.p), b(x.p, x.p);
    for (int i = 0; i < x.p; ++i)
        for (int j = 0; j < x.p; ++j) {
            a(i, j) = static_cast<long double>(y.gram(i, j));
            b(i, j) = static_cast<long double>(x.gram(i, j));
        }
    Eigen::GeneralizedSelfAdjointEigenSolver<LMatrix> es(a, b, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw NotPositiveDefinite("generalized eigensolver failed");
    LVector ev = es.eigenvalues();
    Eigen::VectorXd out(ev.size());
    for (int t = 0; t < ev.size(); ++t) {
        if (ev(t) <= 0) throw NotPositiveDefinite("nonpositive generalized eigenvalue");
        out(t) = static_cast<double>(logl(ev(t)));
    }
    return out;
}

} // namespace

double dist_E(const SymmetricPoint& x, const SymmetricPoint& y) {
    try {
        double d = 0.5 * log_spectrum(x, y).norm();
        if (d < 12.0) return d;
    } catch (const NotPositiveDefinite&) {
    }
    // beyond this scale the double mirrors are unreliable
    return dist_E_via_reduction(x, y);
}

double dist_E_via_reduction(const SymmetricPoint& x, const SymmetricPoint& y,
                            const GeometryConstants& gc) {
    if (x.p != y.p) throw DimensionMismatch("points of different dimension");
    const int p = x.p;
    SiegelReduction rx = siegel_reduce(x, gc), ry = siegel_reduce(y, gc);
    IntMatrix grel = rx.gamma.inverse() * ry.gamma;

    // M = (n_x a_x)^-1 grel (n_y a_y); for nearby points this is tame even
    // when both frames sit deep in the cusp
    LMatrix nx(p, p), ny(p, p), g(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            nx(i, j) = static_cast<long double>(rx.triple.n(i, j));
            ny(i, j) = static_cast<long double>(ry.triple.n(i, j));
            g(i, j) = static_cast<long double>(to_double(grel(i, j)));
        }
    // n_x^{-1} by back substitution (unit upper triangular)
    LMatrix nxi = LMatrix::Identity(p, p);
    for (int col = 0; col < p; ++col)
        for (int i = p - 1; i >= 0; --i) {
            long double s = (i == col) ? 1.0L : 0.0L;
            for (int k = i + 1; k < p; ++k) s -= nx(i, k) * nxi(k, col);
            nxi(i, col) = s;
        }
    LMatrix m(p, p);
    // use the phi profiles for the diagonal scales: exact up to the common
    // determinant drift, which the traceless projection removes below
    LVector ax(p), ay(p);
    for (int i = 0; i < p; ++i) {
        ax(i) = expl(static_cast<long double>(rx.phi(i)));
        ay(i) = expl(static_cast<long double>(ry.phi(i)));
    }
    LMatrix mid = nxi * g * ny;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) m(i, j) = (1.0L / ax(i)) * mid(i, j) * ay(j);
    LMatrix s = m * m.transpose();
    s = 0.5L * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<LMatrix> es(s, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NotPositiveDefinite("frame distance eigensolver failed");
    LVector ev = es.eigenvalues();
    LVector logs(p);
    long double mean = 0;
    for (int i = 0; i < p; ++i) {
        if (ev(i) <= 0) throw NotPositiveDefinite("frame distance: nonpositive spectrum");
        logs(i) = logl(ev(i));
        mean += logs(i);
    }
    mean /= p;
    long double acc = 0;
    for (int i = 0; i < p; ++i) acc += (logs(i) - mean) * (logs(i) - mean);
    return 0.5 * static_cast<double>(sqrtl(acc));
}

SymmetricPoint geodesic(const SymmetricPoint& x, const SymmetricPoint& y, double t) {
    if (x.p != y.p) throw DimensionMismatch("points of different dimension");
    const int p = x.p;
    LMatrix gx(p, p), gy(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            gx(i, j) = static_cast<long double>(x.gram(i, j));
            gy(i, j) = static_cast<long double>(y.gram(i, j));
        }
    Eigen::SelfAdjointEigenSolver<LMatrix> ex(gx);
    if (ex.info() != Eigen::Success) throw NotPositiveDefinite("eigensolver failed");
    LVector d = ex.eigenvalues();
    for (int i = 0; i < d.size(); ++i)
        if (d(i) <= 0) throw NotPositiveDefinite("point not positive definite");
    LVector rtv(p), rtiv(p);
    for (int i = 0; i < p; ++i) {
        rtv(i) = sqrtl(d(i));
        rtiv(i) = 1.0L / rtv(i);
    }
    LMatrix rt = ex.eigenvectors() * rtv.asDiagonal() * ex.eigenvectors().transpose();
    LMatrix rti = ex.eigenvectors() * rtiv.asDiagonal() * ex.eigenvectors().transpose();
    LMatrix mid = rti * gy * rti;
    mid = 0.5L * (mid + mid.transpose());
    Eigen::SelfAdjointEigenSolver<LMatrix> em(mid);
    LVector md = em.eigenvalues();
    LVector mt(md.size());
    for (int i = 0; i < md.size(); ++i) {
        if (md(i) <= 0) throw NotPositiveDefinite("geodesic: nonpositive spectrum");
        mt(i) = powl(md(i), static_cast<long double>(t));
    }
    LMatrix core = em.eigenvectors() * mt.asDiagonal() * em.eigenvectors().transpose();
    LMatrix q = rt * core * rt;
    q = 0.5L * (q + q.transpose());
    std::vector<std::vector<double>> rows; // exact part from the computed entries
    Eigen::MatrixXd out(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) out(i, j) = static_cast<double>(q(i, j));
    ExactGram eg;
    eg.exp2 = 0;
    eg.num.assign(static_cast<std::size_t>(p), std::vector<Int>(static_cast<std::size_t>(p), Int(0)));
    {
        // symmetric dyadic snapshot of the computed gram
        int emin = 0;
        bool any = false;
        std::vector<std::vector<Fx>> cells(static_cast<std::size_t>(p),
                                           std::vector<Fx>(static_cast<std::size_t>(p)));
        for (int i = 0; i < p; ++i)
            for (int j = i; j < p; ++j) {
                cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = fx_of_double(out(i, j));
                const Fx& c = cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (c.v != 0) {
                    if (!any || c.e < emin) emin = c.e;
                    any = true;
                }
            }
        eg.exp2 = any ? emin : 0;
        for (int i = 0; i < p; ++i)
            for (int j = i; j < p; ++j) {
                Fx& c = cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                Int v = c.v;
                if (v != 0) v <<= (c.e - eg.exp2);
                eg.num[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
                eg.num[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                    eg.num[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
    }
    SymmetricPoint sp;
    sp.p = p;
    sp.gram = std::move(out);
    sp.exact = std::move(eg);
    return sp;
}

IwasawaTriple iwasawa(const Eigen::MatrixXd& g) {
    const int p = static_cast<int>(g.rows());
    double det = g.determinant();
    if (std::abs(std::abs(det) - 1.0) > 1e-6) throw Singular("iwasawa: determinant not +-1");
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(p, p); // orthonormal rows, built bottom-up
    IwasawaTriple out;
    out.n = Eigen::MatrixXd::Identity(p, p);
    out.a = Eigen::VectorXd::Zero(p);
    for (int j = p - 1; j >= 0; --j) {
        Eigen::VectorXd v = g.row(j);
        for (int i = p - 1; i > j; --i) {
            double c = g.row(j).dot(u.row(i));
            v -= c * u.row(i).transpose();
            out.n(j, i) = c / out.a(i);
        }
        double norm = v.norm();
        if (norm <= 0) throw Singular("iwasawa: dependent rows");
        out.a(j) = norm;
        u.row(j) = v / norm;
    }
    return out;
}

namespace {

// bottom-up LDL of an exact gram in long double: Q = N diag(a^2) N^T.
// Stable for Siegel-reduced grams, whose profile decreases down the rows.
IwasawaTriple iwasawa_of_exact(const ExactGram& q) {
    const int p = q.dim();
    LMatrix N = LMatrix::Identity(p, p);
    LVector a2 = LVector::Zero(p);
    for (int j = p - 1; j >= 0; --j) {
        for (int l = p - 1; l > j; --l) {
            long double s = q.entry(j, l);
            for (int i = l + 1; i < p; ++i) s -= N(j, i) * a2(i) * N(l, i);
            N(j, l) = s / a2(l);
        }
        long double d = q.entry(j, j);
        for (int i = j + 1; i < p; ++i) d -= N(j, i) * N(j, i) * a2(i);
        if (!(d > 0)) throw NotPositiveDefinite("gram not positive definite in iwasawa");
        a2(j) = d;
    }
    IwasawaTriple out;
    out.n = Eigen::MatrixXd::Identity(p, p);
    out.a = Eigen::VectorXd::Zero(p);
    // the dyadic scale shifts every a uniformly; report in the scaled frame
    for (int i = 0; i < p; ++i) {
        out.a(i) = static_cast<double>(sqrtl(a2(i)));
        for (int j = i + 1; j < p; ++j) out.n(i, j) = static_cast<double>(N(i, j));
    }
    return out;
}

// separate log(a) extraction that survives the full dynamic range
LVector log_profile_of_exact(const ExactGram& q) {
    const int p = q.dim();
    LMatrix N = LMatrix::Identity(p, p);
    std::vector<long double> log_a2(static_cast<std::size_t>(p), 0.0L);
    LVector a2 = LVector::Zero(p); // scaled per row on the fly
    // same recursion, but track logs exactly through the exact entries
    for (int j = p - 1; j >= 0; --j) {
        for (int l = p - 1; l > j; --l) {
            long double s = q.entry(j, l);
            for (int i = l + 1; i < p; ++i) s -= N(j, i) * a2(i) * N(l, i);
            N(j, l) = s / a2(l);
        }
        long double d = q.entry(j, j);
        for (int i = j + 1; i < p; ++i) d -= N(j, i) * N(j, i) * a2(i);
        if (!(d > 0)) throw NotPositiveDefinite("gram not positive definite in iwasawa");
        a2(j) = d;
        log_a2[static_cast<std::size_t>(j)] = logl(d); // entry() already applies the dyadic scale
    }
    LVector out(p);
    for (int i = 0; i < p; ++i) out(i) = 0.5L * log_a2[static_cast<std::size_t>(i)];
    return out;
}

} // namespace

IwasawaTriple iwasawa_of_gram(const Eigen::MatrixXd& q) {
    const int p = static_cast<int>(q.rows());
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(p),
                                          std::vector<double>(static_cast<std::size_t>(p)));
    ExactGram eg;
    eg.exp2 = 0;
    // direct dyadic load of the symmetric matrix
    std::vector<std::vector<Fx>> cells(static_cast<std::size_t>(p), std::vector<Fx>(static_cast<std::size_t>(p)));
    int emin = 0;
    bool any = false;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = fx_of_double(q(i, j));
            const Fx& c = cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (c.v != 0) {
                if (!any || c.e < emin) emin = c.e;
                any = true;
            }
        }
    eg.exp2 = any ? emin : 0;
    eg.num.assign(static_cast<std::size_t>(p), std::vector<Int>(static_cast<std::size_t>(p), Int(0)));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            Fx& c = cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            Int v = c.v;
            if (v != 0) v <<= (c.e - eg.exp2);
            eg.num[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(v);
        }
    (void)rows;
    return iwasawa_of_exact(eg);
}

namespace {

// all-integer LLL (delta = 999/1000) on an exact integer Gram; returns the
// unimodular transform rows (de Weger's formulation)
IntMatrix integer_lll(const std::vector<std::vector<Int>>& gram, IntMatrix v) {
    const int p = v.dim();
    auto dot = [&](int i, int j) {
        Int s = 0;
        for (int k = 0; k < p; ++k) {
            if (v(i, k) == 0) continue;
            for (int l = 0; l < p; ++l) {
                if (v(j, l) == 0) continue;
                s += v(i, k) * gram[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] * v(j, l);
            }
        }
        return s;
    };

    std::vector<Int> d(static_cast<std::size_t>(p) + 1);
    std::vector<std::vector<Int>> lam(static_cast<std::size_t>(p),
                                      std::vector<Int>(static_cast<std::size_t>(p)));
    d[0] = 1;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j <= i; ++j) {
            Int u = dot(i, j);
            for (int k = 0; k < j; ++k)
                u = (d[static_cast<std::size_t>(k) + 1] * u -
                     lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                         lam[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]) /
                    d[static_cast<std::size_t>(k)];
            if (j < i)
                lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = u;
            else {
                if (u <= 0) throw NotPositiveDefinite("degenerate basis in reduction");
                d[static_cast<std::size_t>(i) + 1] = u;
            }
        }

    auto reduce = [&](int k, int j) {
        const Int& den = d[static_cast<std::size_t>(j) + 1];
        Int lkj = lam[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        if (2 * boost::multiprecision::abs(lkj) <= den) return;
        Int q = lkj / den;
        Int rem = lkj - q * den;
        if (2 * boost::multiprecision::abs(rem) > den) q += rem > 0 ? 1 : -1;
        for (int t = 0; t < p; ++t) v(k, t) -= q * v(j, t);
        lam[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] -= q * den;
        for (int t = 0; t < j; ++t)
            lam[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] -=
                q * lam[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
    };

    const Int delta_num = 999, delta_den = 1000;
    int k = 1;
    std::int64_t rounds = 0;
    const std::int64_t cap = 4000000;
    while (k < p) {
        if (++rounds > cap) throw ReductionFailed("reduction did not converge");
        reduce(k, k - 1);
        const Int& lkk = lam[static_cast<std::size_t>(k)][static_cast<std::size_t>(k) - 1];
        if (delta_den * d[static_cast<std::size_t>(k) + 1] * d[static_cast<std::size_t>(k) - 1] <
            delta_num * d[static_cast<std::size_t>(k)] * d[static_cast<std::size_t>(k)] -
                delta_den * lkk * lkk) {
            for (int t = 0; t < p; ++t) std::swap(v(k, t), v(k - 1, t));
            for (int t = 0; t < k - 1; ++t)
                std::swap(lam[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)],
                          lam[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(t)]);
            Int lam_ = lam[static_cast<std::size_t>(k)][static_cast<std::size_t>(k) - 1];
            Int b = (d[static_cast<std::size_t>(k) - 1] * d[static_cast<std::size_t>(k) + 1] +
                     lam_ * lam_) /
                    d[static_cast<std::size_t>(k)];
            for (int i = k + 1; i < p; ++i) {
                Int t = lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                    (d[static_cast<std::size_t>(k) + 1] *
                         lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(k) - 1] -
                     lam_ * t) /
                    d[static_cast<std::size_t>(k)];
                lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(k) - 1] =
                    (b * t + lam_ * lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) /
                    d[static_cast<std::size_t>(k) + 1];
            }
            d[static_cast<std::size_t>(k)] = b;
            k = std::max(1, k - 1);
        } else {
            for (int j = k - 2; j >= 0; --j) reduce(k, j);
            ++k;
        }
    }
    return v;
}

// LLL transform for the bottom-up Siegel convention: reduce in reversed row
// order, then flip back
IntMatrix siegel_lll_transform(const ExactGram& eg) {
    const int p = eg.dim();
    IntMatrix v(p);
    for (int i = 0; i < p; ++i) v(i, p - 1 - i) = 1;
    v = integer_lll(eg.num, std::move(v));
    IntMatrix u(p);
    for (int i = 0; i < p; ++i)
        for (int t = 0; t < p; ++t) u(i, t) = v(p - 1 - i, t);
    return u;
}

ExactGram congruence(const IntMatrix& u, const ExactGram& q) {
    const int p = q.dim();
    ExactGram out;
    out.exp2 = q.exp2;
    std::vector<std::vector<Int>> tmp(static_cast<std::size_t>(p),
                                      std::vector<Int>(static_cast<std::size_t>(p), Int(0)));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            Int s = 0;
            for (int k = 0; k < p; ++k)
                s += u(i, k) * q.num[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            tmp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(s);
        }
    out.num.assign(static_cast<std::size_t>(p), std::vector<Int>(static_cast<std::size_t>(p), Int(0)));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            Int s = 0;
            for (int k = 0; k < p; ++k) s += tmp[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * u(j, k);
            out.num[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(s);
        }
    return out;
}

} // namespace

SiegelReduction siegel_reduce(const SymmetricPoint& x, const GeometryConstants& gc) {
    const int p = x.p;
    IntMatrix u = siegel_lll_transform(x.exact);

    if (u.det() == -1)
        for (int t = 0; t < p; ++t) u(p - 1, t) = -u(p - 1, t);

    // sign canonicalization from the Iwasawa frame, bottom row up so earlier
    // decisions stay valid; flipping a row never changes membership
    IwasawaTriple tri = iwasawa_of_exact(congruence(u, x.exact));
    for (int j = p - 2; j >= 0; --j) {
        for (int i = j + 1; i < p; ++i) {
            if (std::abs(tri.n(j, i)) < 1e-9) continue;
            if (tri.n(j, i) < 0) {
                for (int t = 0; t < p; ++t) u(j, t) = -u(j, t);
                for (int t = j + 1; t < p; ++t) tri.n(j, t) = -tri.n(j, t);
            }
            break;
        }
    }
    ExactGram reduced = congruence(u, x.exact);
    tri = iwasawa_of_exact(reduced);

    const double tol = gc.membership_tol;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (std::abs(tri.n(i, j)) > 0.5 + tol)
                throw ReductionFailed("unipotent part escapes the Siegel box");
    for (int i = 0; i + 1 < p; ++i)
        if (tri.a(i) < gc.eps_siegel * tri.a(i + 1) * (1.0 - tol))
            throw ReductionFailed("diagonal part escapes the Siegel cone");

    SiegelReduction out;
    out.gamma = u.inverse();
    out.triple = tri;
    out.eps_siegel = gc.eps_siegel;
    LVector lp = log_profile_of_exact(reduced);
    out.phi = Eigen::VectorXd(p);
    long double mean = 0;
    for (int i = 0; i < p; ++i) mean += lp(i);
    mean /= p;
    for (int i = 0; i < p; ++i) out.phi(i) = static_cast<double>(lp(i) - mean);
    return out;
}

Eigen::VectorXd phi_of(const SymmetricPoint& x, const GeometryConstants& gc) {
    return siegel_reduce(x, gc).phi;
}

std::vector<SiegelReduction> siegel_reduce_batch(const std::vector<SymmetricPoint>& xs,
                                                 const GeometryConstants& gc, bool parallel) {
    std::vector<SiegelReduction> out(xs.size());
    if (!parallel) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = siegel_reduce(xs[i], gc);
        return out;
    }
#ifdef DEHNLAB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(xs.size()); ++i)
        out[static_cast<std::size_t>(i)] = siegel_reduce(xs[static_cast<std::size_t>(i)], gc);
#else
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = siegel_reduce(xs[i], gc);
#endif
    return out;
}

namespace {

int row_pivot(const std::vector<Int>& r) {
    for (int t = 0; t < static_cast<int>(r.size()); ++t)
        if (r[static_cast<std::size_t>(t)] != 0) return t;
    return -1;
}

// Hermite normal form of the row span, exact
std::vector<std::vector<Int>> hnf_rows(std::vector<std::vector<Int>> work, int p) {
    std::vector<std::vector<Int>> out;
    for (int col = 0; col < p; ++col) {
        std::vector<Int>* lead = nullptr;
        for (auto& r : work) {
            if (row_pivot(r) != col) continue;
            if (!lead) {
                lead = &r;
                continue;
            }
            std::vector<Int>& a = *lead;
            std::vector<Int>& b = r;
            while (b[static_cast<std::size_t>(col)] != 0) {
                Int q = a[static_cast<std::size_t>(col)] / b[static_cast<std::size_t>(col)];
                for (std::size_t t = 0; t < a.size(); ++t) a[t] -= q * b[t];
                std::swap(a, b);
            }
        }
        if (lead) {
            if ((*lead)[static_cast<std::size_t>(col)] < 0)
                for (auto& c : *lead) c = -c;
            out.push_back(*lead);
            lead->assign(static_cast<std::size_t>(p), Int(0));
        }
    }
    for (std::size_t i = out.size(); i-- > 0;) {
        int pv = row_pivot(out[i]);
        for (std::size_t j = 0; j < i; ++j) {
            Int q = out[j][static_cast<std::size_t>(pv)];
            const Int& dd = out[i][static_cast<std::size_t>(pv)];
            Int f = q / dd;
            if (q - f * dd < 0) f -= 1;
            if (f != 0)
                for (std::size_t t = 0; t < out[j].size(); ++t) out[j][t] -= f * out[i][t];
        }
    }
    return out;
}

struct HnfAccum {
    int p;
    std::vector<std::vector<Int>> rows; // always in HNF

    explicit HnfAccum(int p_) : p(p_) {}

    bool contains(std::vector<Int> v) const {
        for (const auto& r : rows) {
            int pv = row_pivot(r);
            const Int& c = v[static_cast<std::size_t>(pv)];
            if (c == 0) continue;
            if (c % r[static_cast<std::size_t>(pv)] != 0) return false;
            Int f = c / r[static_cast<std::size_t>(pv)];
            for (std::size_t t = 0; t < v.size(); ++t) v[t] -= f * r[t];
        }
        for (const Int& c : v)
            if (c != 0) return false;
        return true;
    }

    bool add(std::vector<Int> v) {
        if (contains(v)) return false;
        std::vector<std::vector<Int>> work = rows;
        work.push_back(std::move(v));
        rows = hnf_rows(std::move(work), p);
        return true;
    }
};

} // namespace

bool sublattice_equal(const SublatticeBasis& a, const SublatticeBasis& b) {
    return a.p == b.p && a.rank == b.rank && a.rows == b.rows;
}

SublatticeBasis short_vector_space(const SymmetricPoint& x, double r, std::int64_t node_budget) {
    const int p = x.p;
    if (!(r > 0)) throw Error("short_vector_space: radius must be positive");

    // enumerate in an LLL-reduced basis so the coordinate boxes stay tame,
    // then map the vectors back through the transform
    IntMatrix u = siegel_lll_transform(x.exact);
    ExactGram reduced = congruence(u, x.exact);

    // Cholesky Q = R^T R (R upper); ||v x~||^2 = || R v^T ||^2.
    // The reduced gram is well scaled row by row, so long double suffices.
    LMatrix q(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) q(i, j) = reduced.entry(i, j);
    LMatrix R = LMatrix::Zero(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
            long double s = q(i, j);
            for (int k = 0; k < i; ++k) s -= R(k, i) * R(k, j);
            if (i == j) {
                if (!(s > 0)) throw NotPositiveDefinite("short_vector_space: not positive definite");
                R(i, i) = sqrtl(s);
            } else {
                R(i, j) = s / R(i, i);
            }
        }
    }

    // r is stated against the unit-determinant representative; the exact gram
    // is unnormalized, so rescale the radius by det^{1/p}
    long double logdet = log_of_int(det_of_rows(x.exact.num)) +
                         static_cast<long double>(p) * static_cast<long double>(x.exact.exp2) *
                             0.69314718055994530942L;
    const long double r2 =
        expl(2.0L * logl(static_cast<long double>(r)) + logdet / p) * (1 + 1e-12L);
    HnfAccum acc(p);
    std::vector<long long> coord(static_cast<std::size_t>(p), 0);
    std::int64_t nodes = 0;

    std::vector<long double> partial(static_cast<std::size_t>(p) + 1, 0.0L);
    std::vector<LVector> tails(static_cast<std::size_t>(p) + 1, LVector::Zero(p));

    std::function<void(int)> rec = [&](int i) {
        if (++nodes > node_budget) throw EnumerationBudgetExceeded("sphere enumeration budget");
        if (i < 0) {
            bool nonzero = false;
            for (long long c : coord)
                if (c != 0) nonzero = true;
            if (!nonzero) return;
            for (int t = p - 1; t >= 0; --t) {
                if (coord[static_cast<std::size_t>(t)] > 0) break;
                if (coord[static_cast<std::size_t>(t)] < 0) return;
            }
            std::vector<Int> v(static_cast<std::size_t>(p));
            for (int t = 0; t < p; ++t) {
                Int s = 0;
                for (int k = 0; k < p; ++k) s += Int(coord[static_cast<std::size_t>(k)]) * u(k, t);
                v[static_cast<std::size_t>(t)] = std::move(s);
            }
            acc.add(std::move(v));
            return;
        }
        long double off = tails[static_cast<std::size_t>(i) + 1](i);
        long double center = -off / R(i, i);
        long double room = r2 - partial[static_cast<std::size_t>(i) + 1];
        if (room < 0) return;
        long double half = sqrtl(room) / R(i, i);
        long long lo = static_cast<long long>(ceill(center - half - 1e-9L));
        long long hi = static_cast<long long>(floorl(center + half + 1e-9L));
        for (long long c = lo; c <= hi; ++c) {
            coord[static_cast<std::size_t>(i)] = c;
            long double term = R(i, i) * c + off;
            partial[static_cast<std::size_t>(i)] = partial[static_cast<std::size_t>(i) + 1] + term * term;
            if (partial[static_cast<std::size_t>(i)] > r2) continue;
            tails[static_cast<std::size_t>(i)] = tails[static_cast<std::size_t>(i) + 1];
            for (int t = 0; t < i; ++t) tails[static_cast<std::size_t>(i)](t) += R(t, i) * c;
            rec(i - 1);
        }
        coord[static_cast<std::size_t>(i)] = 0;
    };
    rec(p - 1);

    SublatticeBasis out;
    out.p = p;
    out.rows = acc.rows;
    out.rank = static_cast<int>(acc.rows.size());
    return out;
}

SublatticeBasis flag_sublattice(const IntMatrix& gamma, int k) {
    const int p = gamma.dim();
    IntMatrix gi = gamma.inverse();
    HnfAccum acc(p);
    for (int t = k; t < p; ++t) {
        std::vector<Int> v(static_cast<std::size_t>(p));
        for (int c = 0; c < p; ++c) v[static_cast<std::size_t>(c)] = gi(t, c);
        acc.add(std::move(v));
    }
    SublatticeBasis out;
    out.p = p;
    out.rows = acc.rows;
    out.rank = static_cast<int>(acc.rows.size());
    return out;
}

std::optional<ParabolicWitness> parabolic_witness(const SymmetricPoint& x, const SymmetricPoint& y,
                                                  const IntMatrix& gx, const IntMatrix& gy,
                                                  const GeometryConstants& gc) {
    const int p = x.p;
    Eigen::VectorXd ph = phi_of(x, gc);
    double d = dist_E_via_reduction(x, y, gc);
    const double c = gc.witness_threshold(p);
    int best_j = -1;
    double best_gap = 0;
    for (int j = 0; j + 1 < p; ++j) {
        double gap = (ph(j) - ph(j + 1)) / 2.0 - c;
        if (gap > best_gap) {
            best_gap = gap;
            best_j = j;
        }
    }
    if (best_j < 0 || d >= best_gap) return std::nullopt;
    ParabolicWitness w;
    w.j = best_j + 1; // block sizes (j, p - j)
    w.gap = best_gap;
    IntMatrix z = gx.inverse() * gy;
    w.block_test_passed = in_block_group(z, BlockPartition({w.j, p - w.j}));
    return w;
}

SymmetricPoint assemble_point(const IntMatrix& gamma, const Eigen::MatrixXd& n,
                              const Eigen::VectorXd& a) {
    const int p = gamma.dim();
    // exact product gamma * n * diag(a) over dyadic entries
    std::vector<std::vector<double>> na(static_cast<std::size_t>(p),
                                        std::vector<double>(static_cast<std::size_t>(p), 0.0));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) na[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = n(i, j) * a(j);
    // note: n(i,j) * a(j) rounds once; the product below is exact from there
    // build the basis exactly in dyadic arithmetic
    std::vector<std::vector<Fx>> basis(static_cast<std::size_t>(p), std::vector<Fx>(static_cast<std::size_t>(p)));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            Fx acc{Int(0), 0};
            for (int k = 0; k < p; ++k) {
                Fx cell = fx_of_double(na[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
                cell.v *= gamma(i, k);
                fx_add_into(acc, cell);
            }
            basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc;
        }
    // gram = basis basis^T exactly
    int emin = 0;
    bool any = false;
    std::vector<std::vector<Fx>> g(static_cast<std::size_t>(p), std::vector<Fx>(static_cast<std::size_t>(p)));
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            Fx acc{Int(0), 0};
            for (int k = 0; k < p; ++k)
                fx_add_into(acc, fx_mul(basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                                        basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]));
            g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc;
            if (acc.v != 0) {
                if (!any || acc.e < emin) emin = acc.e;
                any = true;
            }
        }
    ExactGram eg;
    eg.exp2 = any ? emin : 0;
    eg.num.assign(static_cast<std::size_t>(p), std::vector<Int>(static_cast<std::size_t>(p), Int(0)));
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            Fx& c = g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            Int v = c.v;
            if (v != 0) v <<= (c.e - eg.exp2);
            eg.num[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            eg.num[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                eg.num[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    return point_of_exact(std::move(eg));
}

} // namespace dehnlab
