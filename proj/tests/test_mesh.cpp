#include <doctest.h>

#include <cmath>

#include "dehnlab/mesh.hpp"
#include "dehnlab/rng.hpp"

using namespace dehnlab;

namespace {

MinConesField random_field(Rng& rng, std::int64_t t, int cones) {
    std::vector<MinConesField::Cone> cs;
    for (int c = 0; c < cones; ++c)
        cs.push_back({rng.real01() * static_cast<double>(t), rng.real01() * static_cast<double>(t),
                      rng.real01() * static_cast<double>(t) / 4.0});
    return MinConesField(std::move(cs));
}

} // namespace

TEST_CASE("unit field covers with unit squares") {
    ConstantField one(1.0);
    auto cover = whitney_cover(8, one);
    CHECK(cover.size() == 64);
    Mesh mesh = triangulate_cover(cover, 8);
    CHECK(mesh.triangles.size() == 2 * 64);
    AuditReport rep = audit_mesh(mesh, one, 8);
    CHECK(rep.all_pass);
    // closed form: 2 t^2 triangles of perimeter 2 + sqrt(2)
    double expect = 2 * 64 * std::pow(2.0 + std::sqrt(2.0), 2.0);
    CHECK(rep.find("perimeter_square_sum")->observed == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("constant t field gives the single square") {
    ConstantField big(16.0);
    auto cover = whitney_cover(16, big);
    CHECK(cover.size() == 1);
    CHECK(cover[0].side() == 16);
    Mesh mesh = triangulate_cover(cover, 16);
    CHECK(mesh.triangles.size() == 2);
    CHECK(audit_mesh(mesh, big, 16).all_pass);
}

TEST_CASE("cone field produces a graded cover") {
    ConeField cone(64.0, 64.0);
    auto cover = whitney_cover(128, cone);
    Mesh mesh = triangulate_cover(cover, 128);
    AuditReport rep = audit_mesh(mesh, cone, 128);
    for (const auto& l : rep.lines)
        CHECK_MESSAGE(l.pass, l.name, " observed=", l.observed, " bound=", l.bound, " ", l.witness);
    // each square in the cover satisfies the defining predicate exhaustively
    for (const DyadicSquare& s : cover) {
        CHECK(cone.lower_bound_on(s) >= static_cast<double>(s.side()));
        if (s.s > 0) {
            DyadicSquare par = s.parent();
            CHECK(cone.lower_bound_on(par) < static_cast<double>(par.side()));
        }
    }
}

TEST_CASE("whitney cover partition is exact") {
    Rng rng(127);
    for (int trial = 0; trial < 20; ++trial) {
        std::int64_t t = 64;
        MinConesField f = random_field(rng, t, 1 + static_cast<int>(rng.below(4)));
        auto cover = whitney_cover(t, f);
        std::int64_t area = 0;
        for (const DyadicSquare& s : cover) area += s.side() * s.side();
        CHECK(area == t * t);
        Mesh mesh = triangulate_cover(cover, t);
        AuditReport rep = audit_mesh(mesh, f, t);
        CHECK_MESSAGE(rep.all_pass, f.describe());
    }
}

TEST_CASE("determinism and the serial/parallel agreement") {
    Rng rng(131);
    MinConesField f = random_field(rng, 64, 3);
    auto c1 = whitney_cover(64, f, false);
    auto c2 = whitney_cover(64, f, false);
    auto c3 = whitney_cover(64, f, true);
    REQUIRE(c1.size() == c2.size());
    REQUIRE(c1.size() == c3.size());
    for (std::size_t q = 0; q < c1.size(); ++q) {
        CHECK(c1[q] == c2[q]);
        CHECK(c1[q] == c3[q]);
    }
    Mesh m1 = triangulate_cover(c1, 64), m2 = triangulate_cover(c2, 64);
    CHECK(m1.vertices == m2.vertices);
    CHECK(m1.triangles == m2.triangles);
}

TEST_CASE("field violations are rejected") {
    FunctionField bad([](double, double) { return 0.25; });
    CHECK_THROWS_AS(whitney_cover(8, bad), FieldViolation);
    FunctionField steep([](double x, double) { return 1.0 + 5.0 * x; });
    CHECK_THROWS_AS(whitney_cover(8, steep), FieldViolation);
}
