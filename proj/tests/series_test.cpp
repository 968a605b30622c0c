#include "scatter/series.hpp"

#include "doctest.h"

using namespace scatter;

namespace {

IVec iv(std::initializer_list<long> xs) {
    IVec v;
    for (long x : xs) v.push_back(Int(x));
    return v;
}

MonoidContext ctx2() { return MonoidContext::free_monoid({"t1", "t2"}); }

TruncatedSeries mono(const MonoidContext& c, int rank, int order, long num, IVec m, QExp q) {
    return TruncatedSeries::monomial(c, rank, order, Rat(num), std::move(m), std::move(q));
}

TruncatedSeries random_positive_series(SplitMix64& rng, const MonoidContext& c, int order) {
    TruncatedSeries s = TruncatedSeries::zero(c, 2, order);
    int nterm = static_cast<int>(rng.range(1, 5));
    for (int i = 0; i < nterm; ++i) {
        IVec m{Int(rng.range(-2, 2)), Int(rng.range(-2, 2))};
        QExp q{rng.range(0, 2), rng.range(0, 2)};
        if (c.q_degree(q) == 0) q[0] = 1;
        s.add_term(Rat(rng.range(-3, 3)), m, q);
    }
    return s;
}

}  // namespace

TEST_CASE("mul basics") {
    MonoidContext c = ctx2();
    // (1 + t z^v)(1 - t z^v) = 1 - t^2 z^2v
    TruncatedSeries a = TruncatedSeries::one(c, 2, 2) + mono(c, 2, 2, 1, iv({1, 0}), {1, 0});
    TruncatedSeries b = TruncatedSeries::one(c, 2, 2) + mono(c, 2, 2, -1, iv({1, 0}), {1, 0});
    TruncatedSeries p = mul(a, b);
    TruncatedSeries expect = TruncatedSeries::one(c, 2, 2) + mono(c, 2, 2, -1, iv({2, 0}), {2, 0});
    CHECK(p == expect);

    CHECK(mul(a, TruncatedSeries::one(c, 2, 2)) == a);

    // (1 + t1 x)(1 + t2 y) fully expanded at order 2
    TruncatedSeries f = TruncatedSeries::one(c, 2, 2) + mono(c, 2, 2, 1, iv({1, 0}), {1, 0});
    TruncatedSeries g = TruncatedSeries::one(c, 2, 2) + mono(c, 2, 2, 1, iv({0, 1}), {0, 1});
    TruncatedSeries fg = mul(f, g);
    TruncatedSeries expect2 = TruncatedSeries::one(c, 2, 2) + mono(c, 2, 2, 1, iv({1, 0}), {1, 0}) +
                              mono(c, 2, 2, 1, iv({0, 1}), {0, 1}) +
                              mono(c, 2, 2, 1, iv({1, 1}), {1, 1});
    CHECK(fg == expect2);
}

TEST_CASE("mul context mismatch") {
    MonoidContext a = ctx2();
    MonoidContext b = MonoidContext::free_monoid({"s"});
    CHECK_THROWS_AS(mul(TruncatedSeries::one(a, 2, 2), TruncatedSeries::one(b, 2, 2)), DomainError);
}

TEST_CASE("int_pow") {
    MonoidContext c = ctx2();
    TruncatedSeries f = TruncatedSeries::one(c, 2, 2) + mono(c, 2, 2, 1, iv({1, 0}), {1, 0});

    TruncatedSeries inv = int_pow(f, -1);
    TruncatedSeries expect = TruncatedSeries::one(c, 2, 2) + mono(c, 2, 2, -1, iv({1, 0}), {1, 0}) +
                             mono(c, 2, 2, 1, iv({2, 0}), {2, 0});
    CHECK(inv == expect);

    CHECK(int_pow(f, 0) == TruncatedSeries::one(c, 2, 2));

    TruncatedSeries sq = int_pow(f, 2);
    TruncatedSeries expect_sq = TruncatedSeries::one(c, 2, 2) +
                                mono(c, 2, 2, 2, iv({1, 0}), {1, 0}) +
                                mono(c, 2, 2, 1, iv({2, 0}), {2, 0});
    CHECK(sq == expect_sq);

    TruncatedSeries bad = mono(c, 2, 2, 2, iv({0, 0}), {0, 0});
    CHECK_THROWS_AS(int_pow(bad, -1), DomainError);
}

TEST_CASE("int_pow additivity in the exponent") {
    MonoidContext c = ctx2();
    SplitMix64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        TruncatedSeries f =
            TruncatedSeries::one(c, 2, 4) + random_positive_series(rng, c, 4);
        for (long a = -3; a <= 3; ++a)
            for (long b = -3; b <= 3; ++b) {
                TruncatedSeries lhs = mul(int_pow(f, a), int_pow(f, b));
                TruncatedSeries rhs = int_pow(f, a + b);
                CHECK(lhs == rhs);
            }
    }
}

TEST_CASE("exp and log") {
    MonoidContext c = ctx2();
    CHECK(exp_log(TruncatedSeries::zero(c, 2, 3), ExpLogMode::Exp) == TruncatedSeries::one(c, 2, 3));

    // log(1 + t z^v) at order 3: Mercator series
    TruncatedSeries f = TruncatedSeries::one(c, 2, 3) + mono(c, 2, 3, 1, iv({1, 0}), {1, 0});
    TruncatedSeries lg = exp_log(f, ExpLogMode::Log);
    TruncatedSeries expect = mono(c, 2, 3, 1, iv({1, 0}), {1, 0});
    expect.add_term(Rat(-1, 2), iv({2, 0}), {2, 0});
    expect.add_term(Rat(1, 3), iv({3, 0}), {3, 0});
    CHECK(lg == expect);

    // exp(log(1 + t1 x + t2 y)) at order 4
    TruncatedSeries g = TruncatedSeries::one(c, 2, 4) + mono(c, 2, 4, 1, iv({1, 0}), {1, 0}) +
                        mono(c, 2, 4, 1, iv({0, 1}), {0, 1});
    CHECK(exp_log(exp_log(g, ExpLogMode::Log), ExpLogMode::Exp) == g);

    CHECK_THROWS_AS(exp_log(f, ExpLogMode::Exp), DomainError);
    CHECK_THROWS_AS(exp_log(TruncatedSeries::zero(c, 2, 3), ExpLogMode::Log), DomainError);
}

TEST_CASE("exp log round trips on random inputs") {
    MonoidContext c = ctx2();
    SplitMix64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        TruncatedSeries g = random_positive_series(rng, c, 5);
        CHECK(exp_log(exp_log(g, ExpLogMode::Exp), ExpLogMode::Log) == g);
    }
}

TEST_CASE("mul associativity and commutativity on random series") {
    MonoidContext c = ctx2();
    SplitMix64 rng(21);
    for (int trial = 0; trial < 15; ++trial) {
        TruncatedSeries a = random_positive_series(rng, c, 5) + TruncatedSeries::one(c, 2, 5);
        TruncatedSeries b = random_positive_series(rng, c, 5);
        TruncatedSeries d = random_positive_series(rng, c, 5);
        CHECK(mul(a, b) == mul(b, a));
        CHECK(mul(mul(a, b), d) == mul(a, mul(b, d)));
        // truncate-then-multiply == multiply-then-truncate
        CHECK(mul(a.truncated(3), b.truncated(3)) == mul(a, b).truncated(3));
    }
}

TEST_CASE("remap_exponents") {
    // split z^{(v1,e1)} in M + N into t1 z^{v1}
    MonoidContext none = MonoidContext::free_monoid({});
    MonoidContext one_var = MonoidContext::free_monoid({"t1"});
    TruncatedSeries f = TruncatedSeries::one(none, 4, 3);
    f.add_term(Rat(1), iv({0, 1, 1, 0}), QExp{});  // z^{(v1,e1)} with v1=(0,1), e1=(1,0)

    // trick: the q-part is read off the N-coordinates; here the q-degree of the
    // source is 0, so first view f in the one_var context at the same order
    IMat proj(2, 4);
    proj(0, 0) = 1;
    proj(1, 1) = 1;
    // remap with q_map reading the N-part is exercised at the cluster level;
    // here check the plain lattice remap with a manual q computation
    TruncatedSeries g(one_var, 4, 3);
    for (const auto& [k, c] : f.terms()) g.add_term(c, k.m_exp, QExp{static_cast<int64_t>(k.m_exp[2])});
    TruncatedSeries h = remap_exponents(g, LatticeMap(proj), one_var,
                                        [](const QExp& q) { return q; });
    TruncatedSeries expect = TruncatedSeries::one(one_var, 2, 3);
    expect.add_term(Rat(1), iv({0, 1}), {1});
    CHECK(h == expect);

    // identity remap
    MonoidContext c2 = ctx2();
    TruncatedSeries id_in = TruncatedSeries::one(c2, 2, 2) + mono(c2, 2, 2, 3, iv({1, 0}), {1, 0});
    CHECK(remap_exponents(id_in, LatticeMap::identity(2), c2, [](const QExp& q) { return q; }) ==
          id_in);

    // collision merging: t11, t12 -> t1 on (1 + t11 x)(1 + t12 x)
    MonoidContext cc = MonoidContext::free_monoid({"t11", "t12"});
    TruncatedSeries p = mul(TruncatedSeries::one(cc, 1, 2) + mono(cc, 1, 2, 1, iv({1}), {1, 0}),
                            TruncatedSeries::one(cc, 1, 2) + mono(cc, 1, 2, 1, iv({1}), {0, 1}));
    MonoidContext ct = MonoidContext::free_monoid({"t1"});
    TruncatedSeries q = remap_exponents(p, LatticeMap::identity(1), ct,
                                        [](const QExp& e) { return QExp{e[0] + e[1]}; });
    TruncatedSeries expect2 = TruncatedSeries::one(ct, 1, 2);
    expect2.add_term(Rat(2), iv({1}), {1});
    expect2.add_term(Rat(1), iv({2}), {2});
    CHECK(q == expect2);
}
