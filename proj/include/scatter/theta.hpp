#pragma once

#include "scatter/diagram.hpp"

#include <map>
#include <vector>

namespace scatter {

struct GenericityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One straight piece of a broken line.
struct BrokenLineSegment {
    IVec direction;          // m_i; the segment travels with velocity -m_i
    TruncatedSeries coeff;   // a_i in k[[Q]] (lattice part zero); a_1 = 1
    QVec bend_point;         // where this segment begins (empty: from infinity)
};

struct BrokenLine {
    IVec asymptotic_direction;
    QVec endpoint;
    // segments[0] comes from infinity, segments.back() ends at the endpoint
    std::vector<BrokenLineSegment> segments;

    const IVec& final_direction() const { return segments.back().direction; }
    const TruncatedSeries& final_coeff() const { return segments.back().coeff; }
};

// Complete list of broken lines with asymptotic direction m and endpoint p,
// final coefficient nonzero mod m_Q^{k+1}. Throws GenericityError when the
// backward tracing meets a joint, a wall boundary, or travels inside a wall.
std::vector<BrokenLine> broken_lines(const ScatteringDiagram& d, const IVec& m, const QVec& p,
                                     int order);

struct ThetaExpansion {
    IVec m;
    QVec p;
    TruncatedSeries series;
};

ThetaExpansion theta(const ScatteringDiagram& d, const IVec& m, const QVec& p, int order);

// Deterministic generic endpoint p = target + r/1009 with r from a stream
// seeded by the request; `attempt` advances the stream.
QVec generic_point(const ScatteringDiagram& d, const IVec& target, uint64_t stream_seed,
                   int attempt);

enum class MultiplyStrategy { Decomposition, BrokenPairs };

// Row of the structure-constant table: m -> C^m_{m1 m2} as a series in
// k[[Q]] (lattice exponents zero).
struct IVecLess {
    bool operator()(const IVec& a, const IVec& b) const { return ivec_cmp(a, b) < 0; }
};
using StructureRow = std::map<IVec, TruncatedSeries, IVecLess>;

struct StructureConstantTable {
    std::map<std::pair<IVec, IVec>, StructureRow> rows;
};

StructureRow multiply(const ScatteringDiagram& d, const IVec& m1, const IVec& m2, int order,
                      MultiplyStrategy strategy = MultiplyStrategy::Decomposition,
                      uint64_t stream_seed = 0);

// Finite k[[Q]]-combinations of theta functions with product via multiply.
using ThetaCombination = std::map<IVec, TruncatedSeries, IVecLess>;
ThetaCombination theta_product(const ScatteringDiagram& d, const ThetaCombination& a,
                               const ThetaCombination& b, int order, uint64_t stream_seed = 0);
ThetaCombination theta_basis_element(const ScatteringDiagram& d, const IVec& m, int order);

// theta_0 coefficient
TruncatedSeries trace(const ScatteringDiagram& d, const ThetaCombination& x);
TruncatedSeries trace_of_product(const ScatteringDiagram& d, const std::vector<IVec>& ms,
                                 int order, uint64_t stream_seed = 0);

// Lemma-style check: theta_{(m,n)} = z^{(0,n)} theta_{(m,0)} on a C_prin
// diagram over M + N, for `samples` pseudo-random (m, n, p).
bool cprin_theta_shift_check(const ScatteringDiagram& d, int base_rank, int samples, int order,
                             uint64_t stream_seed = 0);

}  // namespace scatter
