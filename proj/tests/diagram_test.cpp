#include "scatter/diagram.hpp"

#include "doctest.h"

using namespace scatter;

namespace {

IVec iv(std::initializer_list<long> xs) {
    IVec v;
    for (long x : xs) v.push_back(Int(x));
    return v;
}

MonoidContext ctx2() { return MonoidContext::free_monoid({"t1", "t2"}); }

TruncatedSeries one_plus(const MonoidContext& c, int rank, int order, IVec m, QExp q) {
    TruncatedSeries s = TruncatedSeries::one(c, rank, order);
    s.add_term(Rat(1), std::move(m), std::move(q));
    return s;
}

// the two-line diagram: x-axis with 1+t1 z^{(1,0)}, y-axis with 1+t2 z^{(0,1)}
ScatteringDiagram two_lines(int order) {
    MonoidContext c = ctx2();
    ScatteringDiagram d;
    d.ambient_rank = 2;
    d.context = c;
    d.order = order;
    d.walls.push_back(make_wall(RationalCone::hyperplane(iv({0, 1})),
                                one_plus(c, 2, order, iv({1, 0}), {1, 0})));
    d.walls.push_back(make_wall(RationalCone::hyperplane(iv({1, 0})),
                                one_plus(c, 2, order, iv({0, 1}), {0, 1})));
    return d;
}

}  // namespace

TEST_CASE("classify walls") {
    MonoidContext c = ctx2();
    // full line with tangent monomials is incoming
    Wall line = make_wall(RationalCone::hyperplane(iv({0, 1})),
                          one_plus(c, 2, 2, iv({1, 0}), {1, 0}));
    CHECK(line.direction == iv({-1, 0}));
    CHECK(classify(line) == WallType::Incoming);

    // ray toward (-1,-1) with monomials z^{(1,1)} is outgoing
    Wall ray = make_wall(cone_from_generators(2, {iv({-1, -1})}),
                         one_plus(c, 2, 2, iv({1, 1}), {1, 1}));
    CHECK(ray.direction == iv({-1, -1}));
    CHECK(classify(ray) == WallType::Outgoing);

    // HDTV initial wall (e1-perp, 1+t1 z^{v1}) with v1=(0,1) is incoming
    Wall init = make_wall(RationalCone::hyperplane(iv({1, 0})),
                          one_plus(c, 2, 2, iv({0, 1}), {1, 0}));
    CHECK(classify(init) == WallType::Incoming);
}

TEST_CASE("classify is invariant under subdividing the support") {
    MonoidContext c = ctx2();
    // subdivide the x-axis line into two rays: each piece classifies by its own cone
    Wall whole = make_wall(RationalCone::hyperplane(iv({0, 1})),
                           one_plus(c, 2, 2, iv({1, 0}), {1, 0}));
    Wall right = make_wall(cone_from_generators(2, {iv({1, 0})}),
                           one_plus(c, 2, 2, iv({1, 0}), {1, 0}));
    CHECK(classify(whole) == WallType::Incoming);
    // m0 = (-1,0); -m0 = (1,0) lies in the right half: still incoming
    CHECK(classify(right) == WallType::Incoming);
    Wall left = make_wall(cone_from_generators(2, {iv({-1, 0})}),
                          one_plus(c, 2, 2, iv({1, 0}), {1, 0}));
    CHECK(classify(left) == WallType::Outgoing);
}

TEST_CASE("crossing automorphism") {
    MonoidContext c = ctx2();
    Wall w = make_wall(RationalCone::hyperplane(iv({1, 0})),
                       one_plus(c, 2, 1, iv({0, 1}), {0, 1}));
    AutomorphismDescriptor a = crossing_automorphism(w, iv({1, 0}), c, 1);
    TruncatedSeries img = a.apply_to_monomial(iv({1, 0}));
    TruncatedSeries expect = TruncatedSeries::monomial(c, 2, 1, Rat(1), iv({1, 0}), {0, 0});
    expect.add_term(Rat(1), iv({1, 1}), {0, 1});
    CHECK(img == expect);

    // tangent monomial is fixed
    TruncatedSeries tangent = a.apply_to_monomial(iv({0, 1}));
    CHECK(tangent == TruncatedSeries::monomial(c, 2, 1, Rat(1), iv({0, 1}), {0, 0}));

    CHECK_THROWS_AS(crossing_automorphism(w, iv({0, 1}), c, 1), DomainError);
}

TEST_CASE("crossing composed with inverse crossing is the identity") {
    MonoidContext c = ctx2();
    Wall w = make_wall(RationalCone::hyperplane(iv({1, 0})),
                       one_plus(c, 2, 4, iv({0, 1}), {0, 1}));
    AutomorphismDescriptor a = crossing_automorphism(w, iv({1, 0}), c, 4);
    AutomorphismDescriptor composed = a;
    for (const WallCrossing& s : a.inverse().steps) composed.steps.push_back(s);
    CHECK(composed.is_identity());
}

TEST_CASE("path ordered product around the origin") {
    // empty diagram: identity
    ScatteringDiagram empty;
    empty.ambient_rank = 2;
    empty.context = ctx2();
    empty.order = 2;
    LoopSpec loop{QVec{Rat(0), Rat(0)}, iv({1, 0}), iv({0, 1}), {Int(2), Int(1)}};
    CHECK(path_ordered_product(empty, loop).is_identity());

    // a single full-line wall is crossed twice with opposite co-normals
    MonoidContext c = ctx2();
    ScatteringDiagram single = empty;
    single.walls.push_back(make_wall(RationalCone::hyperplane(iv({0, 1})),
                                     one_plus(c, 2, 2, iv({1, 0}), {1, 0})));
    AutomorphismDescriptor p = path_ordered_product(single, loop);
    CHECK(p.steps.size() == 2);
    CHECK(p.is_identity());

    // two lines: commutator defect on t1 t2 z^{(1,1)}
    ScatteringDiagram d = two_lines(2);
    AutomorphismDescriptor q = path_ordered_product(d, loop);
    CHECK(!q.is_identity());
    TruncatedSeries img = q.apply_to_monomial(iv({1, 0}));
    // defect carried on monomial t1 t2 z^{(2,1)} in the image of z^{(1,0)}
    bool found = false;
    for (const auto& [k, coeff] : img.terms())
        if (k.q_exp == QExp{1, 1} && ivec_cmp(k.m_exp, iv({2, 1})) == 0) {
            found = true;
            CHECK((coeff == 1 || coeff == -1));
        }
    CHECK(found);
}

TEST_CASE("two-line diagram is inconsistent, corrected diagram is consistent") {
    ScatteringDiagram d = two_lines(2);
    ConsistencyReport r = is_consistent(d);
    CHECK(!r.consistent);
    REQUIRE(r.failures.size() == 1);
    CHECK(cone_dim(r.failures[0].joint) == 0);

    // add the corrector wall (ray toward (-1,-1), 1 + t1 t2 z^{(1,1)})
    MonoidContext c = ctx2();
    d.walls.push_back(make_wall(cone_from_generators(2, {iv({-1, -1})}),
                                one_plus(c, 2, 2, iv({1, 1}), {1, 1})));
    ConsistencyReport r2 = is_consistent(d);
    CHECK(r2.consistent);
}

TEST_CASE("single-wall diagrams are consistent") {
    MonoidContext c = ctx2();
    ScatteringDiagram d;
    d.ambient_rank = 2;
    d.context = c;
    d.order = 3;
    d.walls.push_back(make_wall(RationalCone::hyperplane(iv({0, 1})),
                                one_plus(c, 2, 3, iv({1, 0}), {1, 0})));
    CHECK(is_consistent(d).consistent);
}

TEST_CASE("a lone outgoing ray is inconsistent at its apex") {
    MonoidContext c = ctx2();
    ScatteringDiagram d;
    d.ambient_rank = 2;
    d.context = c;
    d.order = 2;
    d.walls.push_back(make_wall(cone_from_generators(2, {iv({-1, -1})}),
                                one_plus(c, 2, 2, iv({1, 1}), {1, 1})));
    CHECK(!is_consistent(d).consistent);
}

TEST_CASE("equivalence") {
    MonoidContext c = ctx2();
    ScatteringDiagram d = two_lines(2);

    // same diagram with the x-axis wall split into two rays carrying the same function
    ScatteringDiagram split;
    split.ambient_rank = 2;
    split.context = c;
    split.order = 2;
    split.walls.push_back(make_wall(cone_from_generators(2, {iv({1, 0})}),
                                    one_plus(c, 2, 2, iv({1, 0}), {1, 0})));
    split.walls.push_back(make_wall(cone_from_generators(2, {iv({-1, 0})}),
                                    one_plus(c, 2, 2, iv({1, 0}), {1, 0})));
    split.walls.push_back(make_wall(RationalCone::hyperplane(iv({1, 0})),
                                    one_plus(c, 2, 2, iv({0, 1}), {0, 1})));
    CHECK(equivalent(d, split));
    CHECK(equivalent(split, d));

    // adding a trivial wall changes nothing
    ScatteringDiagram with_trivial = d;
    with_trivial.walls.push_back(make_wall(RationalCone::hyperplane(iv({1, 1})),
                                           TruncatedSeries::one(c, 2, 2), iv({1, -1})));
    CHECK(equivalent(d, with_trivial));

    // half-space split with functions f and f^2 differs
    ScatteringDiagram wrong = split;
    {
        TruncatedSeries f = one_plus(c, 2, 2, iv({1, 0}), {1, 0});
        wrong.walls[1] = make_wall(cone_from_generators(2, {iv({-1, 0})}), mul(f, f));
    }
    CHECK(!equivalent(d, wrong));

    // reflexivity / symmetry spot-check
    CHECK(equivalent(d, d));
}

TEST_CASE("normalize merges equal-support walls and drops trivial ones") {
    MonoidContext c = ctx2();
    ScatteringDiagram d;
    d.ambient_rank = 2;
    d.context = c;
    d.order = 2;
    TruncatedSeries f = one_plus(c, 2, 2, iv({1, 0}), {1, 0});
    d.walls.push_back(make_wall(RationalCone::hyperplane(iv({0, 1})), f));
    d.walls.push_back(make_wall(RationalCone::hyperplane(iv({0, 1})), f));
    d.walls.push_back(make_wall(RationalCone::hyperplane(iv({1, 0})),
                                TruncatedSeries::one(c, 2, 2), iv({0, 1})));
    ScatteringDiagram n = normalize(d);
    REQUIRE(n.walls.size() == 1);
    CHECK(*n.walls[0].function == mul(f, f));
}

TEST_CASE("c-wall view round trip") {
    // seed {e1,e2}=1: p1 maps e1 -> v1=(0,1), e2 -> v2=(-1,0)
    IMat p1m(2, 2);
    p1m(0, 1) = -1;
    p1m(1, 0) = 1;
    LatticeMap p1(p1m);
    MonoidContext c = ctx2();
    Wall w = make_wall(RationalCone::hyperplane(iv({1, 0})),
                       one_plus(c, 2, 2, iv({0, 1}), {1, 0}));
    auto view = c_wall_view(w, p1);
    REQUIRE(view.has_value());
    CHECK(view->c_normal == iv({1, 0}));
    // p1(n) = v1 = (0,1) lies in e1-perp: incoming as a C-wall
    CHECK(c_wall_incoming(*view, p1));
    CHECK(classify(w) == WallType::Incoming);

    // outgoing C-wall: support not containing p1(n)
    Wall out = make_wall(cone_from_generators(2, {iv({0, -1})}),
                         one_plus(c, 2, 2, iv({0, 1}), {1, 1}));
    auto view2 = c_wall_view(out, p1);
    REQUIRE(view2.has_value());
    CHECK(!c_wall_incoming(*view2, p1));
    CHECK(classify(out) == WallType::Outgoing);
}
