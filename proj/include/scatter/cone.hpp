#pragma once

#include "scatter/lattice.hpp"

#include <optional>
#include <string>
#include <vector>

namespace scatter {

// Convex rational polyhedral cone with apex 0, stored by constraints:
//   C = { x : <e, x> = 0 for e in eqs,  <b, x> >= 0 for b in ineqs }.
// Walls carry exactly one equation (their span normal); joints carry two.
struct RationalCone {
    int ambient_rank = 0;
    std::vector<IVec> eqs;
    std::vector<IVec> ineqs;

    static RationalCone full(int rank) {
        RationalCone c;
        c.ambient_rank = rank;
        return c;
    }
    static RationalCone hyperplane(const IVec& normal) {
        RationalCone c;
        c.ambient_rank = static_cast<int>(normal.size());
        c.eqs.push_back(primitive(normal));
        return c;
    }
    static RationalCone from_constraints(int rank, std::vector<IVec> eqs, std::vector<IVec> ineqs) {
        RationalCone c;
        c.ambient_rank = rank;
        c.eqs = std::move(eqs);
        c.ineqs = std::move(ineqs);
        return c;
    }
};

// Generator form: C = lineality-span + cone(rays).
struct ConeGens {
    std::vector<IVec> rays;
    std::vector<IVec> lin;
};

ConeGens cone_generators(const RationalCone& c);
RationalCone cone_from_generators(int rank, const std::vector<IVec>& rays,
                                  const std::vector<IVec>& lin = {});

int cone_dim(const RationalCone& c);
std::vector<IVec> cone_lineality(const RationalCone& c);

bool cone_contains(const RationalCone& c, const IVec& x);
bool cone_contains(const RationalCone& c, const QVec& x);
bool cone_relint_contains(const RationalCone& c, const QVec& x);

// Rational point in the relative interior (0 for subspaces).
QVec cone_relint_point(const RationalCone& c);

// Canonical constraint form: eqs = HNF basis of span-perp, ineqs = facet
// normals projected to span-perp-perp and primitivized, both sorted. Two
// cones are equal iff their canonical forms coincide.
RationalCone cone_canonicalize(const RationalCone& c);
bool cone_equal(const RationalCone& a, const RationalCone& b);
// Double inclusion of generators; reference equality for tests.
bool cone_equal_by_generators(const RationalCone& a, const RationalCone& b);
bool cone_subset(const RationalCone& a, const RationalCone& b);

RationalCone cone_intersect(const RationalCone& a, const RationalCone& b);
// Minkowski sum C + R>=0 v.
RationalCone cone_ray_sum(const RationalCone& c, const IVec& v);

// Deterministic total order compatible with cone_equal.
std::string cone_key(const RationalCone& c);

// Intersection of two codimension-one cones when it has codimension two.
std::optional<RationalCone> joint(const RationalCone& w1, const RationalCone& w2);

// Codimension-two faces of a codimension-one cone.
std::vector<RationalCone> cone_facets(const RationalCone& c);

struct RayCrossing {
    Rat s;
    bool transversal;
};

// All s > 0 with base + s*dir in the relative interior of c. Isolated
// crossings only; a ray travelling inside the span of c reports nothing
// (callers detect in-span travel separately).
std::vector<RayCrossing> cone_ray_crossings(const RationalCone& c, const QVec& base,
                                            const IVec& dir);

}  // namespace scatter
