#pragma once

#include "scatter/diagram.hpp"

#include <functional>
#include <optional>

namespace scatter {

struct CompletionPreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Weighted codimension-one fan in a quotient lattice (rank quotient_rank).
// weights[i] == 0 means the cone carries no wall.
struct TropicalHypersurface {
    int quotient_rank = 0;
    std::vector<RationalCone> cones;
    std::vector<Int> weights;
};

struct BalancingReport {
    bool balanced = true;
    std::vector<RationalCone> violations;
};

BalancingReport check_balancing(const TropicalHypersurface& t);

// Widget: one wall per positive-weight cone sigma, support fan_lift(sigma),
// function f^{w_sigma}. Default lift is the full preimage under quotient_map.
// f must lie in k[z^v][[Q]] with f == 1 mod m_Q; all emitted walls are
// incoming with direction -v.
ScatteringDiagram widget(const TropicalHypersurface& t, const LatticeMap& quotient_map,
                         const IVec& v, const TruncatedSeries& f,
                         const std::vector<std::optional<RationalCone>>& fan_lift = {});

struct AddedWall {
    int order = 0;
    RationalCone source_joint;
    Wall wall;
};

struct CompletionReport {
    ScatteringDiagram input;
    ScatteringDiagram output;
    std::vector<AddedWall> added;
};

struct CompletionOptions {
    // merge coplanar same-direction initial walls instead of rejecting inputs
    // with codimension-<2 wall overlaps
    bool perturb = false;
};

// Order-by-order consistent completion: inserts outgoing walls at joints
// until every joint-local loop product is the identity mod m_Q^{k+1}.
CompletionReport complete(const ScatteringDiagram& d_in, int target_order,
                          const CompletionOptions& opts = {});

// Factorizes a joint-local defect (computed around the canonical loop of the
// joint) into outgoing correction walls whose insertion cancels it at the
// given order.
std::vector<Wall> local_defect_factorization(const ScatteringDiagram& d,
                                             const AutomorphismDescriptor& defect,
                                             const RationalCone& jt, int order_j);

}  // namespace scatter
