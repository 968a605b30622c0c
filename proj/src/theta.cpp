#include "scatter/theta.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace scatter {

namespace {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

long to_long(const Int& x) {
    if (x > Int(1000000000000000LL) || x < Int(-1000000000000000LL))
        throw DomainError("pairing exponent out of range");
    return static_cast<long>(x);
}

TruncatedSeries q_scalar_one(const MonoidContext& ctx, int rank, int order) {
    return TruncatedSeries::one(ctx, rank, order);
}

// candidate final directions: m + (sums of wall monomials with q-degree <= order)
std::vector<IVec> candidate_final_directions(const ScatteringDiagram& d, const IVec& m) {
    struct Entry {
        int deg;
    };
    std::map<std::string, std::pair<IVec, int>> incs;  // key -> (vector, min degree)
    incs.emplace(ivec_str(IVec(m.size(), Int(0))), std::make_pair(IVec(m.size(), Int(0)), 0));
    std::vector<std::pair<IVec, int>> gens;
    for (const Wall& w : d.walls)
        for (const auto& [k, c] : w.function->terms()) {
            if (is_zero(k.m_exp)) continue;
            int deg = d.context.q_degree(k.q_exp);
            if (deg < 1) continue;
            gens.emplace_back(k.m_exp, deg);
        }
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<std::pair<IVec, int>> current;
        for (auto& [key, val] : incs) current.push_back(val);
        for (auto& [v, dv] : current)
            for (auto& [g, dg] : gens) {
                int nd = dv + dg;
                if (nd > d.order) continue;
                IVec nv = ivec_add(v, g);
                std::string key = ivec_str(nv);
                auto it = incs.find(key);
                if (it == incs.end()) {
                    incs.emplace(key, std::make_pair(nv, nd));
                    grew = true;
                } else if (nd < it->second.second) {
                    it->second.second = nd;
                    grew = true;
                }
            }
    }
    std::vector<IVec> out;
    for (auto& [key, val] : incs) out.push_back(ivec_add(m, val.first));
    return out;
}

struct TraceState {
    QVec point;
    IVec dir;               // current (later-in-time) segment direction
    TruncatedSeries coeff;  // accumulated product of bend factors (prunes the DFS)
    // backward record: dirs[0] is the final segment; bends[j] is the factor and
    // location of the bend between dirs[j] (later) and dirs[j+1] (earlier)
    std::vector<IVec> dirs;
    std::vector<TruncatedSeries> factors;
    std::vector<QVec> bend_points;
};

struct RayHit {
    Rat s;
    std::vector<size_t> walls;  // indices into d.walls sharing the crossing point
    IVec span_normal;
};

// crossings of the backward ray q + s*dir (s > 0) with the wall supports
std::vector<RayHit> backward_crossings(const ScatteringDiagram& d, const QVec& q, const IVec& dir) {
    std::map<Rat, RayHit> hits;
    for (size_t wi = 0; wi < d.walls.size(); ++wi) {
        const Wall& w = d.walls[wi];
        if (w.function->is_one()) continue;
        const RationalCone& supp = w.support;
        IVec n = w.normal;
        Rat nd = Rat(pairing(n, dir));
        Rat nq = pairing_q(n, q);
        if (nd == 0) {
            if (nq != 0) continue;  // parallel, off the span
            // travelling inside the span: error if the ray actually meets the support
            Rat lo(0), hi(0);
            bool has_lo = false, has_hi = false, feasible = true;
            for (const IVec& a : supp.ineqs) {
                Rat av = Rat(pairing(a, dir));
                Rat aq = pairing_q(a, q);
                if (av == 0) {
                    if (aq < 0) feasible = false;
                    continue;
                }
                Rat bound = -aq / av;
                if (av > 0) {
                    if (!has_lo || bound > lo) lo = bound;
                    has_lo = true;
                } else {
                    if (!has_hi || bound < hi) hi = bound;
                    has_hi = true;
                }
            }
            if (!feasible) continue;
            Rat lo_eff = has_lo ? std::max(lo, Rat(0)) : Rat(0);
            if (!has_hi || hi > lo_eff)
                throw GenericityError("backward ray travels inside a wall");
            continue;
        }
        Rat s = -nq / nd;
        if (s <= 0) continue;
        QVec x(q.size());
        for (size_t i = 0; i < q.size(); ++i) x[i] = q[i] + s * Rat(dir[i]);
        bool inside = cone_contains(supp, x);
        if (!inside) continue;
        if (!cone_relint_contains(supp, x))
            throw GenericityError("backward ray hits a wall boundary");
        auto it = hits.find(s);
        if (it == hits.end()) {
            hits.emplace(s, RayHit{s, {wi}, sign_canonical(n)});
        } else {
            if (ivec_cmp(it->second.span_normal, sign_canonical(n)) != 0)
                throw GenericityError("backward ray hits a joint of two wall spans");
            it->second.walls.push_back(wi);
        }
    }
    std::vector<RayHit> out;
    for (auto& [s, h] : hits) out.push_back(h);
    return out;
}

void trace_backward(const ScatteringDiagram& d, const IVec& m_asym, const TraceState& state,
                    int order, std::vector<BrokenLine>& out, const QVec& endpoint, int depth) {
    if (depth > 8 * (order + 2)) throw DomainError("broken line tracing runaway");
    std::vector<RayHit> hits = backward_crossings(d, state.point, state.dir);
    // terminal branch: pass every crossing; the line escapes to infinity
    if (ivec_cmp(state.dir, m_asym) == 0) {
        BrokenLine line;
        line.asymptotic_direction = m_asym;
        line.endpoint = endpoint;
        size_t s = state.dirs.size();
        // forward order: initial segment first, coefficients a_1 = 1 multiplied
        // up by the bend factors
        TruncatedSeries a = q_scalar_one(d.context, d.ambient_rank, order);
        for (size_t i = 0; i < s; ++i) {
            size_t back = s - 1 - i;  // index into the backward record
            BrokenLineSegment seg;
            seg.direction = state.dirs[back];
            if (i > 0) {
                a = mul(a, state.factors[back]);  // factor at the bend entering this segment
                seg.bend_point = state.bend_points[back];
            }
            seg.coeff = a;
            line.segments.push_back(std::move(seg));
        }
        out.push_back(std::move(line));
    }
    // bend at one of the crossings
    for (const RayHit& hit : hits) {
        QVec x(state.point.size());
        for (size_t i = 0; i < x.size(); ++i) x[i] = state.point[i] + hit.s * Rat(state.dir[i]);
        Int pn = pairing(hit.span_normal, state.dir);
        if (pn == 0) throw GenericityError("tangent crossing");
        long e = to_long(boost::multiprecision::abs(pn));
        // product of the wall functions at the crossing point, raised to <n, m_i>
        TruncatedSeries fpow = q_scalar_one(d.context, d.ambient_rank, order);
        for (size_t wi : hit.walls)
            fpow = mul(fpow, wall_power(d.walls[wi].function, e, order));
        for (const auto& [k, c] : fpow.terms()) {
            if (is_zero(k.m_exp) && d.context.q_degree(k.q_exp) == 0) continue;  // same monomial
            IVec m_earlier = ivec_sub(state.dir, k.m_exp);
            if (is_zero(m_earlier)) continue;
            TruncatedSeries bend_factor = TruncatedSeries::monomial(
                d.context, d.ambient_rank, order, c, IVec(state.point.size(), Int(0)), k.q_exp);
            TruncatedSeries coeff = mul(state.coeff, bend_factor);
            if (coeff.is_zero()) continue;  // beyond the truncation order
            TraceState next;
            next.point = x;
            next.dir = m_earlier;
            next.coeff = std::move(coeff);
            next.dirs = state.dirs;
            next.factors = state.factors;
            next.bend_points = state.bend_points;
            next.factors.push_back(bend_factor);
            next.bend_points.push_back(x);
            next.dirs.push_back(m_earlier);
            trace_backward(d, m_asym, next, order, out, endpoint, depth + 1);
        }
    }
}

}  // namespace

std::vector<BrokenLine> broken_lines(const ScatteringDiagram& d, const IVec& m, const QVec& p,
                                     int order) {
    if (is_zero(m)) throw DomainError("broken_lines: m must be nonzero");
    if (static_cast<int>(p.size()) != d.ambient_rank)
        throw DimensionError("broken_lines: endpoint rank mismatch");
    for (const Wall& w : d.walls)
        if (!w.function->is_one() && cone_contains(w.support, p))
            throw GenericityError("endpoint lies on the support of the diagram");

    std::vector<BrokenLine> out;
    for (const IVec& m_r : candidate_final_directions(d, m)) {
        if (is_zero(m_r)) continue;
        TraceState start;
        start.point = p;
        start.dir = m_r;
        start.coeff = q_scalar_one(d.context, d.ambient_rank, order);
        start.dirs.push_back(m_r);
        trace_backward(d, m, start, order, out, p, 0);
    }
    std::sort(out.begin(), out.end(), [](const BrokenLine& a, const BrokenLine& b) {
        if (int c = ivec_cmp(a.final_direction(), b.final_direction())) return c < 0;
        return series_str(a.final_coeff()) < series_str(b.final_coeff());
    });
    return out;
}

ThetaExpansion theta(const ScatteringDiagram& d, const IVec& m, const QVec& p, int order) {
    ThetaExpansion te;
    te.m = m;
    te.p = p;
    if (is_zero(m)) {
        te.series = TruncatedSeries::one(d.context, d.ambient_rank, order);
        return te;
    }
    te.series = TruncatedSeries::zero(d.context, d.ambient_rank, order);
    for (const BrokenLine& line : broken_lines(d, m, p, order)) {
        const BrokenLineSegment& last = line.segments.back();
        for (const auto& [k, c] : last.coeff.terms()) te.series.add_term(c, last.direction, k.q_exp);
    }
    // triangularity: coefficient of z^m is 1, everything else has positive q-degree
    QExp zero_q(static_cast<size_t>(d.context.q_rank), 0);
    if (te.series.coeff(m, zero_q) != 1)
        throw DomainError("theta: missing unit leading term (non-generic endpoint?)");
    return te;
}

QVec generic_point(const ScatteringDiagram& d, const IVec& target, uint64_t stream_seed,
                   int attempt) {
    std::ostringstream os;
    os << ivec_str(target) << "#" << d.ambient_rank << "#" << stream_seed;
    SplitMix64 rng(fnv1a(os.str()));
    for (int skip = 0; skip < attempt; ++skip)
        for (int i = 0; i < d.ambient_rank; ++i) rng.next();
    QVec p(static_cast<size_t>(d.ambient_rank));
    for (int i = 0; i < d.ambient_rank; ++i) {
        int64_t r = rng.range(-400, 400);
        if (r == 0) r = 211;
        p[i] = Rat(target[i]) + Rat(Int(r), Int(1009));
    }
    return p;
}

namespace {

struct ThetaCache {
    std::map<std::string, TruncatedSeries> entries;
};

const TruncatedSeries& cached_theta(const ScatteringDiagram& d, ThetaCache& cache, const IVec& m,
                                    const QVec& p, int order) {
    std::ostringstream os;
    os << ivec_str(m);
    auto it = cache.entries.find(os.str());
    if (it != cache.entries.end()) return it->second;
    TruncatedSeries s = theta(d, m, p, order).series;
    return cache.entries.emplace(os.str(), std::move(s)).first->second;
}

StructureRow decompose_at(const ScatteringDiagram& d, const TruncatedSeries& product,
                          const QVec& p, int order) {
    ThetaCache cache;
    StructureRow row;
    TruncatedSeries rem = product;
    while (!rem.is_zero()) {
        int min_deg = rem.min_q_degree();
        // all minimal-degree terms, in canonical key order
        std::vector<std::pair<TermKey, Rat>> batch;
        for (const auto& [k, c] : rem.terms())
            if (d.context.q_degree(k.q_exp) == min_deg) batch.emplace_back(k, c);
        for (const auto& [k, c] : batch) {
            const TruncatedSeries& th = cached_theta(d, cache, k.m_exp, p, order);
            TruncatedSeries factor = TruncatedSeries::monomial(
                d.context, d.ambient_rank, order, c, IVec(k.m_exp.size(), Int(0)), k.q_exp);
            rem = rem - mul(factor, th);
            auto it = row.find(k.m_exp);
            if (it == row.end())
                it = row.emplace(k.m_exp, TruncatedSeries::zero(d.context, d.ambient_rank, order))
                         .first;
            it->second.add_term(c, IVec(k.m_exp.size(), Int(0)), k.q_exp);
        }
    }
    for (auto it = row.begin(); it != row.end();) {
        if (it->second.is_zero())
            it = row.erase(it);
        else
            ++it;
    }
    return row;
}

StructureRow multiply_decomposition(const ScatteringDiagram& d, const IVec& m1, const IVec& m2,
                                    int order, uint64_t stream_seed) {
    IVec target = ivec_add(m1, m2);
    for (int attempt = 0; attempt < 32; ++attempt) {
        QVec p = generic_point(d, target, stream_seed, attempt);
        try {
            TruncatedSeries t1 = theta(d, m1, p, order).series;
            TruncatedSeries t2 = theta(d, m2, p, order).series;
            return decompose_at(d, mul(t1, t2), p, order);
        } catch (const GenericityError&) {
            continue;
        }
    }
    throw GenericityError("multiply: no generic endpoint found in 32 attempts");
}

StructureRow multiply_broken_pairs(const ScatteringDiagram& d, const IVec& m1, const IVec& m2,
                                   int order, uint64_t stream_seed) {
    // candidate m from line pairs at a common generic point
    StructureRow candidates = multiply_decomposition(d, m1, m2, order, stream_seed ^ 0x9e37ull);
    StructureRow row;
    for (const auto& [m, unused] : candidates) {
        for (int attempt = 0; attempt < 32; ++attempt) {
            QVec p = generic_point(d, m, stream_seed, attempt);
            try {
                std::vector<BrokenLine> l1 = is_zero(m1)
                                                 ? std::vector<BrokenLine>{}
                                                 : broken_lines(d, m1, p, order);
                std::vector<BrokenLine> l2 = is_zero(m2)
                                                 ? std::vector<BrokenLine>{}
                                                 : broken_lines(d, m2, p, order);
                TruncatedSeries c = TruncatedSeries::zero(d.context, d.ambient_rank, order);
                auto unit_line = [&]() {
                    return q_scalar_one(d.context, d.ambient_rank, order);
                };
                if (is_zero(m1) && is_zero(m2)) {
                    if (is_zero(m)) c = unit_line();
                } else if (is_zero(m1) || is_zero(m2)) {
                    const std::vector<BrokenLine>& ls = is_zero(m1) ? l2 : l1;
                    for (const BrokenLine& b : ls)
                        if (ivec_cmp(b.final_direction(), m) == 0)
                            c = c + b.final_coeff();
                } else {
                    for (const BrokenLine& b1 : l1)
                        for (const BrokenLine& b2 : l2)
                            if (ivec_cmp(ivec_add(b1.final_direction(), b2.final_direction()), m) == 0)
                                c = c + mul(b1.final_coeff(), b2.final_coeff());
                }
                if (!c.is_zero()) row.emplace(m, std::move(c));
                break;
            } catch (const GenericityError&) {
                continue;
            }
        }
    }
    return row;
}

}  // namespace

StructureRow multiply(const ScatteringDiagram& d, const IVec& m1, const IVec& m2, int order,
                      MultiplyStrategy strategy, uint64_t stream_seed) {
    if (is_zero(m1) || is_zero(m2)) {
        // theta_0 = 1 by convention
        StructureRow row;
        const IVec& m = is_zero(m1) ? m2 : m1;
        TruncatedSeries one_coeff = TruncatedSeries::one(d.context, d.ambient_rank, order);
        row.emplace(m, one_coeff);
        return row;
    }
    if (strategy == MultiplyStrategy::Decomposition)
        return multiply_decomposition(d, m1, m2, order, stream_seed);
    return multiply_broken_pairs(d, m1, m2, order, stream_seed);
}

ThetaCombination theta_basis_element(const ScatteringDiagram& d, const IVec& m, int order) {
    ThetaCombination x;
    x.emplace(m, TruncatedSeries::one(d.context, d.ambient_rank, order));
    return x;
}

ThetaCombination theta_product(const ScatteringDiagram& d, const ThetaCombination& a,
                               const ThetaCombination& b, int order, uint64_t stream_seed) {
    ThetaCombination out;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) {
            TruncatedSeries cc = mul(ca, cb);
            if (cc.is_zero()) continue;
            StructureRow row = multiply(d, ma, mb, order, MultiplyStrategy::Decomposition,
                                        stream_seed);
            for (const auto& [m, coeff] : row) {
                TruncatedSeries add = mul(cc, coeff);
                auto it = out.find(m);
                if (it == out.end())
                    it = out.emplace(m, TruncatedSeries::zero(d.context, d.ambient_rank, order))
                             .first;
                it->second = it->second + add;
            }
        }
    for (auto it = out.begin(); it != out.end();) {
        if (it->second.is_zero())
            it = out.erase(it);
        else
            ++it;
    }
    return out;
}

TruncatedSeries trace(const ScatteringDiagram& d, const ThetaCombination& x) {
    IVec zero(static_cast<size_t>(d.ambient_rank), Int(0));
    auto it = x.find(zero);
    if (it == x.end()) return TruncatedSeries::zero(d.context, d.ambient_rank, d.order);
    return it->second;
}

TruncatedSeries trace_of_product(const ScatteringDiagram& d, const std::vector<IVec>& ms,
                                 int order, uint64_t stream_seed) {
    if (ms.empty()) return TruncatedSeries::one(d.context, d.ambient_rank, order);
    ThetaCombination acc = theta_basis_element(d, ms[0], order);
    for (size_t i = 1; i < ms.size(); ++i)
        acc = theta_product(d, acc, theta_basis_element(d, ms[i], order), order, stream_seed);
    return trace(d, acc);
}

bool cprin_theta_shift_check(const ScatteringDiagram& d, int base_rank, int samples, int order,
                             uint64_t stream_seed) {
    int n = base_rank;
    if (d.ambient_rank != 2 * n) throw DimensionError("cprin_theta_shift_check: rank mismatch");
    SplitMix64 rng(stream_seed ^ 0xc0ffee11ull);
    for (int trial = 0; trial < samples; ++trial) {
        IVec m(static_cast<size_t>(2 * n), Int(0));
        IVec nvec(static_cast<size_t>(2 * n), Int(0));
        bool nontrivial = false;
        for (int i = 0; i < n; ++i) {
            m[i] = Int(rng.range(-2, 2));
            nvec[n + i] = Int(rng.range(-2, 2));
            if (nvec[n + i] != 0) nontrivial = true;
        }
        if (!nontrivial) nvec[n] = 1;
        if (is_zero(m)) m[0] = 1;
        IVec mn = ivec_add(m, nvec);

        bool ok = false;
        for (int attempt = 0; attempt < 32 && !ok; ++attempt) {
            QVec p = generic_point(d, mn, stream_seed + static_cast<uint64_t>(trial), attempt);
            try {
                TruncatedSeries lhs = theta(d, mn, p, order).series;
                TruncatedSeries shift = TruncatedSeries::monomial(
                    d.context, 2 * n, order, Rat(1), nvec,
                    QExp(static_cast<size_t>(d.context.q_rank), 0));
                TruncatedSeries rhs = mul(shift, theta(d, m, p, order).series);
                if (!(lhs == rhs)) return false;
                ok = true;
            } catch (const GenericityError&) {
                continue;
            }
        }
        if (!ok) throw GenericityError("cprin_theta_shift_check: no generic endpoint found");
    }
    return true;
}

}  // namespace scatter
