#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "dehnlab/matrix.hpp"
#include "dehnlab/word.hpp"

namespace dehnlab {

// Shipped geometry constants.  eps_siegel comes from the reduction quality of
// LLL at delta = 0.999 (Lovasz guarantees consecutive scale ratios >= 0.866);
// the slack constants are calibrated on construct-then-reduce round trips.
struct GeometryConstants {
    double eps_siegel = 0.45;
    double hausdorff_slack = 4.0;  // |phi - log a| componentwise on round trips
    double phi_slack = 4.0;        // |phi_i(x) - phi_i(y)| <= d_E(x,y) + phi_slack
    double witness_margin = 1.0;   // extra margin on top of phi_slack + flag_window_slack
    double membership_tol = 1e-6;

    double flag_window_slack(int p) const; // c_V = log(sqrt(p) * eps^-p)
    double witness_threshold(int p) const; // c = phi_slack + flag_window_slack + margin
};

// Gram matrix with exact dyadic entries: value = num * 2^exp2.  Doubles are
// dyadic rationals, so Grams assembled from double factors stay exact; the
// small eigendirections of deep cusp points survive where a raw double
// matrix would lose them.
struct ExactGram {
    std::vector<std::vector<Int>> num;
    int exp2 = 0;

    int dim() const { return static_cast<int>(num.size()); }
    long double entry(int i, int j) const;
};

ExactGram exact_gram_of_rows(const std::vector<std::vector<double>>& rows);

// Point of E = SL(p;R)/SO(p), stored as the Gram matrix of the row basis
// (invariant under the rotation quotient), determinant normalized to 1 in
// the double mirror; the exact part keeps the construction's full range.
struct SymmetricPoint {
    int p = 0;
    Eigen::MatrixXd gram; // normalized mirror for the metric operations
    ExactGram exact;      // unnormalized, used by reduction and enumeration
};

SymmetricPoint point_of(const Eigen::MatrixXd& g);
SymmetricPoint point_of(const IntMatrix& g);
SymmetricPoint point_of_exact(ExactGram eg);

// translate: the point of g * x-basis, i.e. Gram g Q g^T (exact on the
// exact part)
SymmetricPoint translate(const IntMatrix& g, const SymmetricPoint& x);

double dist_E(const SymmetricPoint& x, const SymmetricPoint& y);

// distance computed in the reduced Siegel frames of both points; survives
// deep cusp points, where the plain spectral route loses the small
// eigendirections
double dist_E_via_reduction(const SymmetricPoint& x, const SymmetricPoint& y,
                            const GeometryConstants& gc = {});

// constant-speed geodesic, t in [0, 1]
SymmetricPoint geodesic(const SymmetricPoint& x, const SymmetricPoint& y, double t);

struct IwasawaTriple {
    Eigen::MatrixXd n;  // upper unitriangular
    Eigen::VectorXd a;  // positive diagonal, product 1
};

// x = n a k with k orthogonal (discarded), computed by orthogonalizing rows
// bottom-up (row p first)
IwasawaTriple iwasawa(const Eigen::MatrixXd& g);

// same data from the Gram matrix alone: Q = N diag(a^2) N^T
IwasawaTriple iwasawa_of_gram(const Eigen::MatrixXd& q);

struct SiegelReduction {
    IntMatrix gamma;     // x is in gamma * S
    IwasawaTriple triple; // Iwasawa data of gamma^-1 x
    Eigen::VectorXd phi;  // log a, sums to 0
    double eps_siegel = 0.0;
};

SiegelReduction siegel_reduce(const SymmetricPoint& x, const GeometryConstants& gc = {});

Eigen::VectorXd phi_of(const SymmetricPoint& x, const GeometryConstants& gc = {});

// deterministic batch reduction; the parallel path must agree bit-for-bit
// with the serial reference
std::vector<SiegelReduction> siegel_reduce_batch(const std::vector<SymmetricPoint>& xs,
                                                 const GeometryConstants& gc, bool parallel);

struct SublatticeBasis {
    int p = 0;
    int rank = 0;
    std::vector<std::vector<Int>> rows; // Hermite normal form, rank rows
};

bool sublattice_equal(const SublatticeBasis& a, const SublatticeBasis& b);

// subgroup of Z^p generated by lattice vectors of quadratic-form length <= r,
// found by sphere enumeration with a node budget
SublatticeBasis short_vector_space(const SymmetricPoint& x, double r,
                                   std::int64_t node_budget = 10000000);

// Z_k gamma^-1 = row span of the last p-k standard vectors times gamma^-1
SublatticeBasis flag_sublattice(const IntMatrix& gamma, int k);

struct ParabolicWitness {
    int j = 0;                    // block cut: gx^-1 gy lies in U(j, p-j)
    double gap = 0.0;             // (phi_j - phi_j+1)/2 - c at the winning j
    bool block_test_passed = false;
};

// returns a witness when the gap hypothesis holds at some cut; the block test
// is exact integer arithmetic
std::optional<ParabolicWitness> parabolic_witness(const SymmetricPoint& x, const SymmetricPoint& y,
                                                  const IntMatrix& gx, const IntMatrix& gy,
                                                  const GeometryConstants& gc = {});

// test helper: the point [gamma n a] from explicit Iwasawa data
SymmetricPoint assemble_point(const IntMatrix& gamma, const Eigen::MatrixXd& n,
                              const Eigen::VectorXd& a);

} // namespace dehnlab
