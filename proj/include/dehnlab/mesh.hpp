#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dehnlab/errors.hpp"

namespace dehnlab {

// [i 2^s, (i+1) 2^s] x [j 2^s, (j+1) 2^s]
struct DyadicSquare {
    std::int64_t i = 0, j = 0;
    int s = 0;

    std::int64_t side() const { return std::int64_t(1) << s; }
    std::int64_t x0() const { return i << s; }
    std::int64_t y0() const { return j << s; }
    std::int64_t x1() const { return (i + 1) << s; }
    std::int64_t y1() const { return (j + 1) << s; }
    DyadicSquare parent() const { return DyadicSquare{i >> 1, j >> 1, s + 1}; }

    bool operator==(const DyadicSquare& o) const { return i == o.i && j == o.j && s == o.s; }
};

// 1-Lipschitz sizing field with h >= 1.  lower_bound_on must return a value
// certified to be <= inf over the square; the default uses the Lipschitz
// envelope of the corner samples, analytic fields override it exactly.
class SizingField {
public:
    virtual ~SizingField() = default;
    virtual double value(double x, double y) const = 0;
    virtual double lower_bound_on(const DyadicSquare& sq) const;
    virtual std::string describe() const { return "field"; }
};

class ConstantField final : public SizingField {
public:
    explicit ConstantField(double c) : c_(c) {}
    double value(double, double) const override { return c_; }
    double lower_bound_on(const DyadicSquare&) const override { return c_; }
    std::string describe() const override;

private:
    double c_;
};

// h(v) = max(1, ||v - center||_inf / 2)
class ConeField final : public SizingField {
public:
    ConeField(double cx, double cy) : cx_(cx), cy_(cy) {}
    double value(double x, double y) const override;
    double lower_bound_on(const DyadicSquare& sq) const override;
    std::string describe() const override;

private:
    double cx_, cy_;
};

// h(v) = max(1, min_k (b_k + ||v - q_k||_2)); admissible for any b_k, q_k
class MinConesField final : public SizingField {
public:
    struct Cone {
        double qx, qy, b;
    };
    explicit MinConesField(std::vector<Cone> cones) : cones_(std::move(cones)) {}
    double value(double x, double y) const override;
    double lower_bound_on(const DyadicSquare& sq) const override;
    std::string describe() const override;

private:
    std::vector<Cone> cones_;
};

// arbitrary callable; falls back to the corner-envelope bound
class FunctionField final : public SizingField {
public:
    explicit FunctionField(std::function<double(double, double)> f) : f_(std::move(f)) {}
    double value(double x, double y) const override { return f_(x, y); }

private:
    std::function<double(double, double)> f_;
};

// Whitney cover of D^2(t): maximal dyadic squares with h >= side certified.
// Throws FieldViolation if the sampled admissibility test fails.
std::vector<DyadicSquare> whitney_cover(std::int64_t t, const SizingField& h, bool parallel = false);

struct Mesh {
    std::int64_t t = 0;
    std::vector<std::array<std::int64_t, 2>> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<DyadicSquare> squares;   // cover squares, polygon provenance
    std::vector<int> triangle_square;    // triangle -> square index
    std::vector<int> polygon_sides;      // per square, before fanning
};

// inserts hanging vertices so adjacent squares meet edge-to-edge, then fans
// each polygon from its lexicographically least vertex
Mesh triangulate_cover(const std::vector<DyadicSquare>& cover, std::int64_t t);

struct AuditLine {
    std::string name;
    bool pass = true;
    double observed = 0.0;
    double bound = 0.0;
    std::string witness;
};

struct AuditReport {
    std::vector<AuditLine> lines;
    bool all_pass = true;

    const AuditLine* find(const std::string& name) const;
};

// checks the construction invariants: lattice vertices, disjoint tiling with
// Sum sigma^2 = t^2, edge length sandwich, neighbor grading <= 8, polygon
// sides <= 32, vertex incidence <= 128, Sum perim^2 <= 1152 t^2, triangle
// count <= 32 t^2, Euler characteristic of a disc
AuditReport audit_mesh(const Mesh& mesh, const SizingField& h, std::int64_t t);

} // namespace dehnlab
