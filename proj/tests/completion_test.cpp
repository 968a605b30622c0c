#include "scatter/completion.hpp"

#include "scatter/cluster.hpp"

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

TEST_CASE("balancing") {
    // single full hyperplane, weight 1
    TropicalHypersurface t;
    t.quotient_rank = 2;
    t.cones.push_back(RationalCone::hyperplane(iv({0, 1})));
    t.weights.push_back(Int(1));
    CHECK(check_balancing(t).balanced);

    // fan of three rays (1,0), (0,1), (-1,-1), weights 1
    TropicalHypersurface t3;
    t3.quotient_rank = 2;
    for (auto dir : {iv({1, 0}), iv({0, 1}), iv({-1, -1})}) {
        t3.cones.push_back(cone_from_generators(2, {dir}));
        t3.weights.push_back(Int(1));
    }
    CHECK(check_balancing(t3).balanced);

    // two rays only: unbalanced at the origin
    TropicalHypersurface t2;
    t2.quotient_rank = 2;
    for (auto dir : {iv({1, 0}), iv({0, 1})}) {
        t2.cones.push_back(cone_from_generators(2, {dir}));
        t2.weights.push_back(Int(1));
    }
    BalancingReport rep = check_balancing(t2);
    CHECK(!rep.balanced);
    REQUIRE(rep.violations.size() == 1);
    CHECK(cone_dim(rep.violations[0]) == 0);
}

TEST_CASE("widget for the cluster-case hypersurface") {
    // seed {e1,e2}=1 in rank 2: quotient M/Zv_1 has rank 1; hypersurface is a point
    IMat skew(2, 2);
    skew(0, 1) = 1;
    skew(1, 0) = -1;
    Seed s = make_seed(SkewForm(skew), {0, 1});
    ClusterHypersurface ch = cluster_hypersurface(s, 0);
    CHECK(check_balancing(ch.hypersurface).balanced);

    MonoidContext c = ctx2();
    TruncatedSeries f = one_plus(c, 2, 3, iv({0, 1}), {1, 0});  // 1 + t1 z^{v1}
    ScatteringDiagram w = widget(ch.hypersurface, ch.quotient_map, iv({0, 1}), f);
    REQUIRE(w.walls.size() == 1);
    CHECK(classify(w.walls[0]) == WallType::Incoming);
    // the wall covers e1-perp
    CHECK(cone_equal(w.walls[0].support, RationalCone::hyperplane(iv({1, 0}))));
    CHECK(*w.walls[0].function == f);

    // weight-0 cones emit no wall
    TropicalHypersurface t0 = ch.hypersurface;
    t0.weights[0] = 0;
    CHECK(widget(t0, ch.quotient_map, iv({0, 1}), f).walls.empty());

    // weight-2 cone squares the function
    TropicalHypersurface t2 = ch.hypersurface;
    t2.weights[0] = 2;
    ScatteringDiagram w2 = widget(t2, ch.quotient_map, iv({0, 1}), f);
    REQUIRE(w2.walls.size() == 1);
    CHECK(*w2.walls[0].function == mul(f, f));
}

TEST_CASE("widget completion equals the single wall (rank 3)") {
    // rank-3 seed {e1,e2}=1, e3 frozen: quotient of e1-perp has rank 2, split it
    IMat skew(3, 3);
    skew(0, 1) = 1;
    skew(1, 0) = -1;
    Seed s = make_seed(SkewForm(skew), {0, 1});
    ClusterHypersurface ch = cluster_hypersurface(s, 0, /*split=*/true);
    REQUIRE(ch.hypersurface.cones.size() == 2);
    CHECK(check_balancing(ch.hypersurface).balanced);

    MonoidContext c = MonoidContext::free_monoid({"t1"});
    IVec v1 = v_vectors(s)[0];  // (0,1,0)
    TruncatedSeries f = one_plus(c, 3, 3, v1, {1});
    ScatteringDiagram w = widget(ch.hypersurface, ch.quotient_map, v1, f);
    REQUIRE(w.walls.size() == 2);
    for (const Wall& wall : w.walls) CHECK(classify(wall) == WallType::Incoming);

    // the two half-hyperplane walls already form a consistent diagram
    // equivalent to the single wall (e1-perp, f)
    CompletionReport rep = complete(w, 3, CompletionOptions{});
    ScatteringDiagram single;
    single.ambient_rank = 3;
    single.context = c;
    single.order = 3;
    single.walls.push_back(make_wall(RationalCone::hyperplane(iv({1, 0, 0})), f));
    CHECK(equivalent(rep.output, single));
}

TEST_CASE("commutator completion at order 8") {
    ScatteringDiagram d = two_lines(8);
    CompletionReport rep = complete(d, 8, CompletionOptions{});
    CHECK(is_consistent(rep.output).consistent);
    REQUIRE(rep.output.walls.size() == 3);

    // exactly one added wall: (ray toward (-1,-1), 1 + t1 t2 z^{(1,1)})
    ScatteringDiagram input_n = normalize(d);
    std::vector<const Wall*> added;
    for (const Wall& w : rep.output.walls) {
        bool is_input = false;
        for (const Wall& iw : input_n.walls)
            if (cone_equal(w.support, iw.support) && *w.function == *iw.function) is_input = true;
        if (!is_input) added.push_back(&w);
    }
    REQUIRE(added.size() == 1);
    CHECK(cone_equal(added[0]->support, cone_from_generators(2, {iv({-1, -1})})));
    TruncatedSeries expect = one_plus(ctx2(), 2, 8, iv({1, 1}), {1, 1});
    CHECK(*added[0]->function == expect);
    CHECK(classify(*added[0]) == WallType::Outgoing);
    CHECK(added[0]->direction == iv({-1, -1}));

    // every wall in the report is outgoing
    for (const AddedWall& a : rep.added) CHECK(classify(a.wall) == WallType::Outgoing);
}

TEST_CASE("completion is idempotent and monotone in the order") {
    ScatteringDiagram d = two_lines(6);
    CompletionReport rep = complete(d, 6, CompletionOptions{});
    CompletionReport again = complete(rep.output, 6, CompletionOptions{});
    CHECK(again.added.empty());
    CHECK(equivalent(again.output, rep.output));

    // order-k output truncated to order j equals the order-j completion
    CompletionReport low = complete(two_lines(3), 3, CompletionOptions{});
    ScatteringDiagram truncated = truncate_diagram(rep.output, 3);
    CHECK(equivalent(truncated, low.output));
}

TEST_CASE("single hyperplane wall is already complete") {
    MonoidContext c = ctx2();
    ScatteringDiagram d;
    d.ambient_rank = 2;
    d.context = c;
    d.order = 4;
    d.walls.push_back(make_wall(RationalCone::hyperplane(iv({0, 1})),
                                one_plus(c, 2, 4, iv({1, 0}), {1, 0})));
    CompletionReport rep = complete(d, 4, CompletionOptions{});
    CHECK(rep.added.empty());
    CHECK(equivalent(rep.output, normalize(d)));
}

TEST_CASE("A2 cluster completion stabilizes with one added wall") {
    IMat skew(2, 2);
    skew(0, 1) = 1;
    skew(1, 0) = -1;
    Seed s = make_seed(SkewForm(skew), {0, 1});
    ScatteringDiagram init = initial_diagram(s, DiagramKind::HdtvX, 10);
    CompletionReport rep = complete(init, 10, CompletionOptions{});
    CHECK(is_consistent(rep.output).consistent);
    REQUIRE(rep.output.walls.size() == 3);

    // the added wall carries 1 + t1 t2 z^{v1+v2}
    IVec v12 = ivec_add(v_vectors(s)[0], v_vectors(s)[1]);  // (-1, 1)
    bool found = false;
    for (const Wall& w : rep.output.walls) {
        if (classify(w) != WallType::Outgoing) continue;
        TruncatedSeries expect = one_plus(init.context, 2, 10, v12, {1, 1});
        CHECK(*w.function == expect);
        CHECK(cone_equal(w.support, cone_from_generators(2, {ivec_neg(v12)})));
        found = true;
    }
    CHECK(found);

    // wall-support stabilization between orders 3 and 10
    CompletionReport rep3 = complete(initial_diagram(s, DiagramKind::HdtvX, 3), 3, CompletionOptions{});
    REQUIRE(rep3.output.walls.size() == rep.output.walls.size());
    for (size_t i = 0; i < rep.output.walls.size(); ++i)
        CHECK(cone_equal(rep.output.walls[i].support, rep3.output.walls[i].support));
}

TEST_CASE("precondition rejection and perturb flag") {
    MonoidContext c = ctx2();
    // two coplanar hyperplane walls with different directions overlap in codim < 2
    ScatteringDiagram d;
    d.ambient_rank = 2;
    d.context = c;
    d.order = 3;
    d.walls.push_back(make_wall(RationalCone::hyperplane(iv({0, 1})),
                                one_plus(c, 2, 3, iv({1, 0}), {1, 0})));
    d.walls.push_back(make_wall(RationalCone::hyperplane(iv({0, 1})),
                                one_plus(c, 2, 3, iv({-1, 0}), {0, 1})));
    CHECK_THROWS_AS(complete(d, 3, CompletionOptions{}), CompletionPreconditionError);
    CompletionOptions opts;
    opts.perturb = true;
    CompletionReport rep = complete(d, 3, opts);
    CHECK(is_consistent(rep.output).consistent);

    // an outgoing ray is not a valid initial wall unless already consistent
    ScatteringDiagram bad;
    bad.ambient_rank = 2;
    bad.context = c;
    bad.order = 2;
    bad.walls.push_back(make_wall(cone_from_generators(2, {iv({-1, -1})}),
                                  one_plus(c, 2, 2, iv({1, 1}), {1, 1})));
    CHECK_THROWS_AS(complete(bad, 2, CompletionOptions{}), CompletionPreconditionError);
}
