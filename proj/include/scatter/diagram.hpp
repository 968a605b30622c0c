#pragma once

#include "scatter/cone.hpp"
#include "scatter/series.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace scatter {

struct NonTransversalPathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Codimension-one rational cone with attached function f in k[z^{-m0}][[Q]],
// f == 1 mod m_Q. `direction` is the primitive m0, `normal` the primitive
// span normal of the support (sign-canonical).
struct Wall {
    RationalCone support;
    IVec direction;
    std::shared_ptr<const TruncatedSeries> function;
    IVec normal;
};

// Derives direction and normal from the function and support; validates the
// wall invariants. An explicit direction is required only when the function
// has no z-monomials to read it from.
Wall make_wall(const RationalCone& support, TruncatedSeries function,
               std::optional<IVec> direction = std::nullopt);

enum class WallType { Incoming, Outgoing };
WallType classify(const Wall& w);

struct ScatteringDiagram {
    int ambient_rank = 0;
    MonoidContext context;
    int order = 0;
    std::vector<Wall> walls;
};

void validate_diagram(const ScatteringDiagram& d);
// Merge walls with identical support and direction, drop trivial functions,
// sort canonically.
ScatteringDiagram normalize(const ScatteringDiagram& d);
ScatteringDiagram truncate_diagram(const ScatteringDiagram& d, int new_order);

// One wall crossing: z^m -> f^{<co_normal, m>} z^m with co_normal the
// primitive normal negative on the approach side.
struct WallCrossing {
    IVec co_normal;
    std::shared_ptr<const TruncatedSeries> function;
};

// Ordered composition of wall crossings; steps[0] is crossed first and is
// applied outermost.
struct AutomorphismDescriptor {
    int ambient_rank = 0;
    MonoidContext ctx;
    int order = 0;
    std::vector<WallCrossing> steps;

    TruncatedSeries apply(const TruncatedSeries& s) const;
    TruncatedSeries apply_to_monomial(const IVec& m) const;
    bool is_identity() const;
    AutomorphismDescriptor inverse() const;
};

TruncatedSeries apply_crossing(const WallCrossing& c, const TruncatedSeries& s);
// f^e with a shared power cache keyed on the function object.
const TruncatedSeries& wall_power(const std::shared_ptr<const TruncatedSeries>& f, long e,
                                  int order);

AutomorphismDescriptor crossing_automorphism(const Wall& w, const IVec& co_normal,
                                             const MonoidContext& ctx, int order);

// A small counterclockwise loop around `base` inside the 2-plane
// base + span(u, w); crossings start after direction `start`.
struct LoopSpec {
    QVec base;
    IVec u, w;
    std::pair<Int, Int> start = {Int(1), Int(0)};  // plane coordinates
};

// Path-ordered product around the loop. Same-span walls crossing at the same
// trace ray are merged (their crossing automorphisms commute).
AutomorphismDescriptor path_ordered_product(const ScatteringDiagram& d, const LoopSpec& loop);

// Crossing of the loop with one cone: trace-ray plane coordinates and the
// primitive span normal negative on the approach side (counterclockwise).
struct GeometricCrossing {
    std::pair<Int, Int> ray;
    IVec co_normal;
    size_t index;
};

// Crossings of a small counterclockwise loop with codimension-one cones
// through the loop base, in cyclic order starting after loop.start.
std::vector<GeometricCrossing> loop_geometric_crossings(const std::vector<RationalCone>& supports,
                                                        const LoopSpec& loop);

// Deterministic transversal loop around a codimension-two locus.
LoopSpec make_transversal_loop(const std::vector<RationalCone>& supports, const RationalCone& around);
LoopSpec make_joint_loop(const ScatteringDiagram& d, const RationalCone& jt);

std::vector<RationalCone> enumerate_joints(const ScatteringDiagram& d);

struct JointDefect {
    RationalCone joint;
    // P(z^{e_i}) * z^{-e_i} - 1 per ambient basis vector
    std::vector<TruncatedSeries> defect;
};

struct ConsistencyReport {
    bool consistent = true;
    std::vector<JointDefect> failures;
};

ConsistencyReport is_consistent(const ScatteringDiagram& d);

bool equivalent(const ScatteringDiagram& d1, const ScatteringDiagram& d2);

// Cluster-style view of a wall: support inside c_normal^perp, monomials along
// p1(c_normal).
struct CWallView {
    Wall wall;
    IVec c_normal;
};

std::optional<CWallView> c_wall_view(const Wall& w, const LatticeMap& p1);
bool c_wall_incoming(const CWallView& v, const LatticeMap& p1);

}  // namespace scatter
