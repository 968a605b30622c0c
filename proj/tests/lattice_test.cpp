#include "scatter/lattice.hpp"

#include "doctest.h"

using namespace scatter;

namespace {
IVec iv(std::initializer_list<long> xs) {
    IVec v;
    for (long x : xs) v.push_back(Int(x));
    return v;
}
}  // namespace

TEST_CASE("pairing on dual bases") {
    CHECK(pairing(iv({1, 0}), iv({0, 1})) == 0);
    CHECK(pairing(iv({1, 0}), iv({1, 0})) == 1);
    CHECK(pairing(iv({2, -3}), iv({4, 1})) == 5);
    CHECK_THROWS_AS(pairing(iv({1}), iv({1, 2})), DimensionError);
}

TEST_CASE("pairing bilinearity on pseudo-random triples") {
    SplitMix64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        IVec n(3), m1(3), m2(3);
        for (int i = 0; i < 3; ++i) {
            n[i] = Int(rng.range(-9, 9));
            m1[i] = Int(rng.range(-9, 9));
            m2[i] = Int(rng.range(-9, 9));
        }
        Int a = Int(rng.range(-5, 5)), b = Int(rng.range(-5, 5));
        IVec comb = ivec_add(ivec_scale(m1, a), ivec_scale(m2, b));
        CHECK(pairing(n, comb) == a * pairing(n, m1) + b * pairing(n, m2));
    }
}

TEST_CASE("primitive_part") {
    auto [v1, g1] = primitive_part(iv({2, 4}));
    CHECK(v1 == iv({1, 2}));
    CHECK(g1 == 2);
    auto [v2, g2] = primitive_part(iv({1, 0}));
    CHECK(v2 == iv({1, 0}));
    CHECK(g2 == 1);
    auto [v3, g3] = primitive_part(iv({-6, 9}));
    CHECK(v3 == iv({-2, 3}));
    CHECK(g3 == 3);
    CHECK_THROWS_AS(primitive_part(iv({0, 0})), DomainError);
}

TEST_CASE("primitive_part of scalar multiples") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        IVec v(3);
        do {
            for (int i = 0; i < 3; ++i) v[i] = Int(rng.range(-6, 6));
        } while (is_zero(v));
        Int k = Int(rng.range(1, 5));
        auto [pv, g] = primitive_part(v);
        auto [pk, gk] = primitive_part(ivec_scale(v, k));
        CHECK(pk == pv);
        CHECK(gk == k * g);
    }
}

TEST_CASE("kernel_sublattice") {
    CHECK(kernel_sublattice(LatticeMap::identity(2)).empty());

    LatticeMap zero(IMat(2, 2));
    auto kz = kernel_sublattice(zero);
    CHECK(kz.size() == 2);

    // skew map {e1,e2}=1, e3 central on Z^3: p(n) = {n,.} has kernel Z e3
    IMat skew(3, 3);
    skew(0, 1) = 1;
    skew(1, 0) = -1;
    LatticeMap p(skew.transpose());
    auto k = kernel_sublattice(p);
    REQUIRE(k.size() == 1);
    CHECK(k[0] == iv({0, 0, 1}));
}

TEST_CASE("kernel vectors map to zero, primitive, independent") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        IMat a(2, 4);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 4; ++j) a(i, j) = Int(rng.range(-4, 4));
        LatticeMap f(a);
        auto basis = kernel_sublattice(f);
        for (const IVec& v : basis) {
            CHECK(is_zero(f.apply(v)));
            CHECK(ivec_gcd(v) == 1);
        }
        if (!basis.empty())
            CHECK(rank_of(IMat::from_rows(basis, 4)) == static_cast<int>(basis.size()));
        // rank-nullity over the rationals
        CHECK(static_cast<int>(basis.size()) == 4 - rank_of(a));
    }
}

TEST_CASE("smith normal form divisibility and transforms") {
    SplitMix64 rng(1234);
    for (int trial = 0; trial < 20; ++trial) {
        IMat a(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) a(i, j) = Int(rng.range(-6, 6));
        SmithResult s = smith_normal_form(a);
        IMat lhs = s.U.mul(a).mul(s.V);
        CHECK(lhs == s.D);
        for (int i = 0; i + 1 < 3; ++i) {
            if (s.D(i, i) != 0 && s.D(i + 1, i + 1) != 0)
                CHECK(s.D(i + 1, i + 1) % s.D(i, i) == 0);
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) CHECK(s.D(i, j) == 0);
    }
}

TEST_CASE("extend_to_basis completes a saturated sublattice") {
    std::vector<IVec> sub{iv({0, 0, 1})};
    IMat b = extend_to_basis(sub, 3);
    CHECK(b.row(0) == iv({0, 0, 1}));
    SmithResult s = smith_normal_form(b);
    CHECK(boost::multiprecision::abs(s.D(0, 0) * s.D(1, 1) * s.D(2, 2)) == 1);
}

TEST_CASE("skew form validation") {
    IMat good(2, 2);
    good(0, 1) = 1;
    good(1, 0) = -1;
    SkewForm f(good);
    CHECK(f.eval(iv({1, 0}), iv({0, 1})) == 1);
    CHECK(f.eval(iv({0, 1}), iv({1, 0})) == -1);

    IMat bad(2, 2);
    bad(0, 1) = 1;
    bad(1, 0) = 1;
    CHECK_THROWS_AS(SkewForm{bad}, DomainError);
}
