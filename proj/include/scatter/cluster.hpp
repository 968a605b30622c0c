#pragma once

#include "scatter/completion.hpp"
#include "scatter/diagram.hpp"

#include <string>
#include <vector>

namespace scatter {

struct AssumptionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Skew-symmetric cluster seed: lattice N = Z^rank with the form {.,.},
// unfrozen index subset I. v_i = p1(e_i) = {e_i, -}.
struct Seed {
    int rank = 0;
    SkewForm skew;
    std::vector<int> unfrozen;
};

Seed make_seed(SkewForm skew, std::vector<int> unfrozen);

// p1 : N -> M, n |-> {n, .}
LatticeMap p1_map(const Seed& s);
// full p : N -> M used for the fiber/quotient constructions (same formula,
// kept separate for intent)
LatticeMap p_map(const Seed& s);
std::vector<IVec> v_vectors(const Seed& s);

// Seed with principal coefficients on N~ = N + M; unfrozen (e_i, 0), i in I.
struct PrincipalSeed {
    Seed base;
    Seed principal;
};
PrincipalSeed principal_seed(const Seed& s);

struct AssumptionReport {
    bool x_ok = false;
    bool injective = false;
    std::string coprime_note;
};
AssumptionReport check_assumptions(const Seed& s);

enum class DiagramKind { Cluster, APrin, XPrin, HdtvX, HdtvA, HdtvARestricted };
DiagramKind diagram_kind_from_string(const std::string& s);
std::string diagram_kind_name(DiagramKind k);

// Initial (not yet completed) scattering diagram of the given kind, with the
// bookkeeping monoid N^I (N^I~ for hdtv_a).
ScatteringDiagram initial_diagram(const Seed& s, DiagramKind kind, int order);

MonoidContext seed_context(const Seed& s);

// Quotient by N_R: sends a C_prin-style diagram over M + N to a diagram over
// M, rewriting z^{(m,n)} with the bookkeeping variables.
ScatteringDiagram psi(const ScatteringDiagram& d, const Seed& s);
// Reconstruction of walls as preimages (injectivity of psi at diagram level).
ScatteringDiagram psi_preimage(const ScatteringDiagram& d, const Seed& s);

// Intersect a completed aprin diagram with iota(N_R), iota(n) = (p1(n), n).
ScatteringDiagram slice_to_x(const ScatteringDiagram& d, const Seed& s);

// Intersection with mu^{-1}(0) = K-perp in M_R, K = ker p.
ScatteringDiagram fiber_diagram(const ScatteringDiagram& d, const Seed& s);

// Push a K_R-invariant diagram over N to N/K.
ScatteringDiagram quotient_diagram(const ScatteringDiagram& d, const Seed& s);

// Tropical hypersurface of the i-th initial wall in the cluster case:
// supported on the image of e_i-perp in M/Zv_i with all weights 1. When
// `split` is true the hyperplane is subdivided into two half-spaces (for
// exercising multi-cone widgets).
struct ClusterHypersurface {
    TropicalHypersurface hypersurface;
    LatticeMap quotient_map;  // M -> M/Zv_i
};
ClusterHypersurface cluster_hypersurface(const Seed& s, int i, bool split = false);

}  // namespace scatter
