#include "scatter/cone.hpp"

#include "doctest.h"

using namespace scatter;

namespace {
IVec iv(std::initializer_list<long> xs) {
    IVec v;
    for (long x : xs) v.push_back(Int(x));
    return v;
}
QVec qv(std::initializer_list<Rat> xs) { return QVec(xs); }
RationalCone ray2(long x, long y) { return cone_from_generators(2, {iv({x, y})}); }
}  // namespace

TEST_CASE("generators of simple cones") {
    // first quadrant
    RationalCone c = RationalCone::from_constraints(2, {}, {iv({1, 0}), iv({0, 1})});
    ConeGens g = cone_generators(c);
    CHECK(g.lin.empty());
    REQUIRE(g.rays.size() == 2);
    CHECK(cone_dim(c) == 2);

    // x-axis line
    RationalCone line = RationalCone::hyperplane(iv({0, 1}));
    ConeGens gl = cone_generators(line);
    CHECK(gl.rays.empty());
    REQUIRE(gl.lin.size() == 1);
    CHECK(cone_dim(line) == 1);
}

TEST_CASE("round trip constraints -> generators -> constraints") {
    RationalCone ray = ray2(-1, -1);
    CHECK(cone_dim(ray) == 1);
    CHECK(cone_contains(ray, iv({-2, -2})));
    CHECK(!cone_contains(ray, iv({1, 1})));
    CHECK(!cone_contains(ray, iv({-1, 0})));

    RationalCone again = cone_canonicalize(ray);
    CHECK(cone_equal(ray, again));
    CHECK(cone_equal_by_generators(ray, again));
}

TEST_CASE("half-hyperplane cone in rank 3") {
    // half of the plane z=0 with x >= 0
    RationalCone c = RationalCone::from_constraints(3, {iv({0, 0, 1})}, {iv({1, 0, 0})});
    CHECK(cone_dim(c) == 2);
    ConeGens g = cone_generators(c);
    CHECK(g.lin.size() == 1);  // the y-axis
    CHECK(g.rays.size() == 1);
    auto facets = cone_facets(c);
    REQUIRE(facets.size() == 1);  // the y-axis line
    CHECK(cone_dim(facets[0]) == 1);
    CHECK(cone_contains(facets[0], iv({0, 5, 0})));
    CHECK(cone_contains(facets[0], iv({0, -5, 0})));
}

TEST_CASE("joint of two hyperplane walls") {
    RationalCone x_axis = RationalCone::hyperplane(iv({0, 1}));
    RationalCone y_axis = RationalCone::hyperplane(iv({1, 0}));
    auto j = joint(x_axis, y_axis);
    REQUIRE(j.has_value());
    CHECK(cone_dim(*j) == 0);

    // coplanar overlapping cones: no joint
    RationalCone half1 = RationalCone::from_constraints(2, {iv({0, 1})}, {iv({1, 0})});
    auto none = joint(x_axis, half1);
    CHECK(!none.has_value());

    // e1-perp and e2-perp in rank 3 meet in a line
    RationalCone p1 = RationalCone::hyperplane(iv({1, 0, 0}));
    RationalCone p2 = RationalCone::hyperplane(iv({0, 1, 0}));
    auto line = joint(p1, p2);
    REQUIRE(line.has_value());
    CHECK(cone_dim(*line) == 1);
    CHECK(cone_contains(*line, iv({0, 0, 1})));

    CHECK_THROWS_AS(joint(RationalCone::hyperplane(iv({1, 0})), p1), DimensionError);
}

TEST_CASE("joint is symmetric") {
    RationalCone a = RationalCone::from_constraints(3, {iv({1, 0, 0})}, {iv({0, 1, 0})});
    RationalCone b = RationalCone::hyperplane(iv({0, 0, 1}));
    auto j1 = joint(a, b);
    auto j2 = joint(b, a);
    REQUIRE(j1.has_value());
    REQUIRE(j2.has_value());
    CHECK(cone_equal_by_generators(*j1, *j2));
    CHECK(cone_key(*j1) == cone_key(*j2));
}

TEST_CASE("cone_ray_crossings") {
    RationalCone x_axis = RationalCone::hyperplane(iv({0, 1}));
    auto hits = cone_ray_crossings(x_axis, qv({Rat(1, 2), Rat(-1)}), iv({0, 1}));
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].s == Rat(1));
    CHECK(hits[0].transversal);

    CHECK(cone_ray_crossings(x_axis, qv({Rat(1, 2), Rat(-1)}), iv({1, 0})).empty());

    RationalCone ray = ray2(-1, -1);
    auto h2 = cone_ray_crossings(ray, qv({Rat(1), Rat(-3)}), iv({-1, 1}));
    REQUIRE(h2.size() == 1);
    CHECK(h2[0].s == Rat(2));
    CHECK(h2[0].transversal);

    // crossing the boundary point of the ray is not a relint crossing
    auto h3 = cone_ray_crossings(ray, qv({Rat(1), Rat(-1)}), iv({-1, 1}));
    CHECK(h3.empty());
}

TEST_CASE("relint membership and sample") {
    RationalCone quad = RationalCone::from_constraints(2, {}, {iv({1, 0}), iv({0, 1})});
    QVec p = cone_relint_point(quad);
    CHECK(cone_relint_contains(quad, p));
    CHECK(!cone_relint_contains(quad, qv({Rat(1), Rat(0)})));

    RationalCone ray = ray2(2, 3);
    QVec rp = cone_relint_point(ray);
    CHECK(cone_relint_contains(ray, rp));
}

TEST_CASE("intersection and ray sum") {
    RationalCone quad = RationalCone::from_constraints(2, {}, {iv({1, 0}), iv({0, 1})});
    RationalCone upper = RationalCone::from_constraints(2, {}, {iv({0, 1})});
    RationalCone i = cone_intersect(quad, upper);
    CHECK(cone_equal(i, quad));

    RationalCone sum = cone_ray_sum(ray2(1, 0), iv({0, 1}));
    CHECK(cone_equal(sum, quad));

    // Minkowski sum of a line joint with a ray: half-plane in rank 3
    RationalCone line = RationalCone::from_constraints(3, {iv({1, 0, 0}), iv({0, 1, 0})}, {});
    RationalCone half = cone_ray_sum(line, iv({1, -1, 0}));
    CHECK(cone_dim(half) == 2);
    CHECK(cone_contains(half, iv({2, -2, 7})));
    CHECK(!cone_contains(half, iv({-1, 1, 0})));
}

TEST_CASE("canonical keys separate distinct cones") {
    CHECK(cone_key(ray2(1, 1)) != cone_key(ray2(-1, -1)));
    CHECK(cone_key(ray2(1, 1)) == cone_key(cone_from_generators(2, {iv({3, 3})})));
    RationalCone lineA = RationalCone::hyperplane(iv({1, -1}));
    RationalCone lineB = cone_from_generators(2, {}, {iv({1, 1})});
    CHECK(cone_key(lineA) == cone_key(lineB));
}
