#include "scatter/diagram.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace scatter {

namespace {

IVec basis_vector(int rank, int i) {
    IVec e(static_cast<size_t>(rank), Int(0));
    e[i] = 1;
    return e;
}

long to_long(const Int& x) {
    if (x > Int(1000000000000000LL) || x < Int(-1000000000000000LL))
        throw DomainError("pairing exponent out of range");
    return static_cast<long>(x);
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

Wall make_wall(const RationalCone& support, TruncatedSeries function, std::optional<IVec> direction) {
    Wall w;
    w.support = cone_canonicalize(support);
    if (cone_dim(w.support) != w.support.ambient_rank - 1)
        throw DomainError("make_wall: support must have codimension one");
    if (w.support.eqs.size() != 1) throw DomainError("make_wall: canonical support needs one span normal");
    w.normal = sign_canonical(w.support.eqs[0]);
    if (!function.is_one_mod_mq()) throw DomainError("make_wall: function must be 1 mod m_Q");
    if (function.lattice_rank() != w.support.ambient_rank)
        throw DimensionError("make_wall: function lattice rank mismatch");

    std::optional<IVec> d0;  // primitive vector with all monomials in N>=1 * d0
    for (const auto& [k, c] : function.terms()) {
        if (is_zero(k.m_exp)) continue;
        IVec p = primitive(k.m_exp);
        if (!d0) d0 = p;
        if (ivec_cmp(*d0, p) != 0)
            throw DomainError("make_wall: function monomials not along a single direction");
    }
    if (d0) {
        IVec m0 = ivec_neg(*d0);
        if (direction && ivec_cmp(*direction, m0) != 0)
            throw DomainError("make_wall: supplied direction contradicts function monomials");
        w.direction = m0;
    } else {
        if (!direction) {
            ConeGens g = cone_generators(w.support);
            if (!g.lin.empty())
                w.direction = primitive(g.lin[0]);
            else if (!g.rays.empty())
                w.direction = primitive(g.rays[0]);
            else
                throw DomainError("make_wall: cannot infer a direction for a trivial wall");
        } else {
            w.direction = primitive(*direction);
        }
    }
    if (pairing(w.normal, w.direction) != 0)
        throw DomainError("make_wall: direction not tangent to the support span");
    w.function = std::make_shared<const TruncatedSeries>(std::move(function));
    return w;
}

WallType classify(const Wall& w) {
    return cone_contains(w.support, ivec_neg(w.direction)) ? WallType::Incoming : WallType::Outgoing;
}

void validate_diagram(const ScatteringDiagram& d) {
    for (const Wall& w : d.walls) {
        if (w.support.ambient_rank != d.ambient_rank)
            throw DimensionError("diagram: wall ambient rank mismatch");
        if (w.function->context() != d.context) throw DomainError("diagram: wall monoid context mismatch");
        if (w.function->order() != d.order) throw DomainError("diagram: wall truncation order mismatch");
    }
}

namespace {

std::string wall_sort_key(const Wall& w) {
    std::ostringstream os;
    os << cone_key(w.support) << "#" << ivec_str(w.direction) << "#" << series_str(*w.function);
    return os.str();
}

}  // namespace

ScatteringDiagram normalize(const ScatteringDiagram& d) {
    ScatteringDiagram out;
    out.ambient_rank = d.ambient_rank;
    out.context = d.context;
    out.order = d.order;
    std::map<std::string, Wall> merged;
    for (const Wall& w : d.walls) {
        if (w.function->is_one()) continue;
        std::string key = cone_key(w.support) + "#" + ivec_str(w.direction);
        auto it = merged.find(key);
        if (it == merged.end()) {
            merged.emplace(key, w);
        } else {
            TruncatedSeries f = mul(*it->second.function, *w.function);
            it->second.function = std::make_shared<const TruncatedSeries>(std::move(f));
        }
    }
    for (auto& [k, w] : merged) {
        if (w.function->is_one()) continue;
        out.walls.push_back(w);
    }
    std::sort(out.walls.begin(), out.walls.end(),
              [](const Wall& a, const Wall& b) { return wall_sort_key(a) < wall_sort_key(b); });
    return out;
}

ScatteringDiagram truncate_diagram(const ScatteringDiagram& d, int new_order) {
    ScatteringDiagram out;
    out.ambient_rank = d.ambient_rank;
    out.context = d.context;
    out.order = new_order;
    for (const Wall& w : d.walls) {
        Wall t = w;
        t.function = std::make_shared<const TruncatedSeries>(w.function->truncated(new_order));
        out.walls.push_back(std::move(t));
    }
    return normalize(out);
}

const TruncatedSeries& wall_power(const std::shared_ptr<const TruncatedSeries>& f, long e,
                                  int order) {
    struct Key {
        const void* p;
        long e;
        int order;
        bool operator<(const Key& o) const {
            if (p != o.p) return p < o.p;
            if (e != o.e) return e < o.e;
            return order < o.order;
        }
    };
    static std::map<Key, TruncatedSeries> cache;
    static std::vector<std::shared_ptr<const TruncatedSeries>> keepalive;
    Key k{f.get(), e, order};
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    if (cache.size() > 200000) {
        cache.clear();
        keepalive.clear();
    }
    keepalive.push_back(f);
    TruncatedSeries p = int_pow(f->truncated(order), e);
    return cache.emplace(k, std::move(p)).first->second;
}

TruncatedSeries apply_crossing(const WallCrossing& c, const TruncatedSeries& s) {
    TruncatedSeries out(s.context(), s.lattice_rank(), s.order());
    for (const auto& [k, coeff] : s.terms()) {
        long e = to_long(pairing(c.co_normal, k.m_exp));
        if (e == 0) {
            out.add_term(coeff, k.m_exp, k.q_exp);
            continue;
        }
        const TruncatedSeries& p = wall_power(c.function, e, s.order());
        TruncatedSeries t = TruncatedSeries::monomial(s.context(), s.lattice_rank(), s.order(),
                                                      coeff, k.m_exp, k.q_exp);
        out = out + mul(t, p);
    }
    return out;
}

TruncatedSeries AutomorphismDescriptor::apply(const TruncatedSeries& s) const {
    TruncatedSeries cur = s;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) cur = apply_crossing(*it, cur);
    return cur;
}

TruncatedSeries AutomorphismDescriptor::apply_to_monomial(const IVec& m) const {
    return apply(TruncatedSeries::monomial(ctx, ambient_rank, order, Rat(1), m,
                                           QExp(static_cast<size_t>(ctx.q_rank), 0)));
}

bool AutomorphismDescriptor::is_identity() const {
    for (int i = 0; i < ambient_rank; ++i) {
        IVec e = basis_vector(ambient_rank, i);
        TruncatedSeries img = apply_to_monomial(e);
        TruncatedSeries id = TruncatedSeries::monomial(ctx, ambient_rank, order, Rat(1), e,
                                                       QExp(static_cast<size_t>(ctx.q_rank), 0));
        if (!(img == id)) return false;
    }
    return true;
}

AutomorphismDescriptor AutomorphismDescriptor::inverse() const {
    AutomorphismDescriptor inv;
    inv.ambient_rank = ambient_rank;
    inv.ctx = ctx;
    inv.order = order;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        WallCrossing c;
        c.co_normal = it->co_normal;
        c.function = std::make_shared<const TruncatedSeries>(int_pow(*it->function, -1));
        inv.steps.push_back(std::move(c));
    }
    return inv;
}

AutomorphismDescriptor crossing_automorphism(const Wall& w, const IVec& co_normal,
                                             const MonoidContext& ctx, int order) {
    IVec cn = primitive(co_normal);
    if (ivec_cmp(cn, w.normal) != 0 && ivec_cmp(cn, ivec_neg(w.normal)) != 0)
        throw DomainError("crossing_automorphism: co_normal not proportional to the wall normal");
    AutomorphismDescriptor a;
    a.ambient_rank = w.support.ambient_rank;
    a.ctx = ctx;
    a.order = order;
    a.steps.push_back(WallCrossing{cn, w.function});
    return a;
}

namespace {

using PlaneVec = std::pair<Int, Int>;  // coordinates in the (u, w) plane

PlaneVec plane_primitive(const Int& s, const Int& t) {
    Int g = boost::multiprecision::gcd(s, t);
    if (g == 0) return {Int(0), Int(0)};
    return {s / g, t / g};
}

int plane_half(const PlaneVec& v) {
    if (v.second > 0 || (v.second == 0 && v.first > 0)) return 0;
    return 1;
}

Int plane_cross(const PlaneVec& a, const PlaneVec& b) {
    return a.first * b.second - a.second * b.first;
}

// strict counterclockwise order starting at angle 0
bool angle_less(const PlaneVec& a, const PlaneVec& b) {
    int ha = plane_half(a), hb = plane_half(b);
    if (ha != hb) return ha < hb;
    return plane_cross(a, b) > 0;
}

}  // namespace

std::vector<GeometricCrossing> loop_geometric_crossings(const std::vector<RationalCone>& supports,
                                                        const LoopSpec& loop) {
    std::vector<GeometricCrossing> out;
    for (size_t wi = 0; wi < supports.size(); ++wi) {
        const RationalCone& supp = supports[wi];
        if (!cone_contains(supp, loop.base)) continue;
        if (supp.eqs.size() != 1)
            throw NonTransversalPathError("loop crossing: support not in canonical codim-1 form");
        IVec normal = sign_canonical(supp.eqs[0]);
        Int nu = pairing(normal, loop.u);
        Int nw = pairing(normal, loop.w);
        if (nu == 0 && nw == 0) throw NonTransversalPathError("loop plane lies inside a wall span");
        PlaneVec rho = plane_primitive(-nw, nu);
        for (int sgn = 0; sgn < 2; ++sgn) {
            PlaneVec r2 = sgn == 0 ? rho : PlaneVec{-rho.first, -rho.second};
            IVec v_amb = ivec_add(ivec_scale(loop.u, r2.first), ivec_scale(loop.w, r2.second));
            bool ok = true, boundary = false;
            for (const IVec& a : supp.ineqs) {
                if (pairing_q(a, loop.base) != 0) continue;
                Int val = pairing(a, v_amb);
                if (val < 0) ok = false;
                if (val == 0) boundary = true;
            }
            if (!ok) continue;
            if (boundary) throw NonTransversalPathError("loop crosses a wall at its boundary");
            // co-normal: negative on the approach side of a counterclockwise loop
            PlaneVec tau{-r2.second, r2.first};
            Int val = nu * tau.first + nw * tau.second;
            if (val == 0) throw NonTransversalPathError("loop tangent to wall");
            IVec cn = val > 0 ? normal : ivec_neg(normal);
            out.push_back(GeometricCrossing{r2, cn, wi});
        }
    }
    // distinct spans must give distinct trace rays
    for (size_t i = 0; i < out.size(); ++i)
        for (size_t j = i + 1; j < out.size(); ++j)
            if (out[i].ray == out[j].ray &&
                ivec_cmp(sign_canonical(out[i].co_normal), sign_canonical(out[j].co_normal)) != 0)
                throw NonTransversalPathError("two wall spans share a trace ray");
    for (const GeometricCrossing& c : out)
        if (c.ray == loop.start) throw NonTransversalPathError("loop start lies on a crossing ray");
    std::stable_sort(out.begin(), out.end(), [](const GeometricCrossing& a, const GeometricCrossing& b) {
        if (a.ray != b.ray) return angle_less(a.ray, b.ray);
        return a.index < b.index;
    });
    // rotate so the sequence starts strictly after loop.start
    size_t first = 0;
    while (first < out.size() && !angle_less(loop.start, out[first].ray)) ++first;
    std::rotate(out.begin(), out.begin() + static_cast<long>(first), out.end());
    return out;
}

AutomorphismDescriptor path_ordered_product(const ScatteringDiagram& d, const LoopSpec& loop) {
    std::vector<const Wall*> walls;
    std::vector<RationalCone> supports;
    for (const Wall& w : d.walls) {
        if (w.function->is_one()) continue;
        walls.push_back(&w);
        supports.push_back(w.support);
    }
    std::vector<GeometricCrossing> crossings = loop_geometric_crossings(supports, loop);

    AutomorphismDescriptor a;
    a.ambient_rank = d.ambient_rank;
    a.ctx = d.context;
    a.order = d.order;
    for (size_t i = 0; i < crossings.size(); ++i) {
        const Wall* w = walls[crossings[i].index];
        // merge same-ray crossings (same span; automorphisms commute)
        if (!a.steps.empty() && i > 0 && crossings[i].ray == crossings[i - 1].ray &&
            ivec_cmp(crossings[i].co_normal, a.steps.back().co_normal) == 0) {
            TruncatedSeries f = mul(*a.steps.back().function, *w->function);
            a.steps.back().function = std::make_shared<const TruncatedSeries>(std::move(f));
            continue;
        }
        a.steps.push_back(WallCrossing{crossings[i].co_normal, w->function});
    }
    return a;
}

LoopSpec make_transversal_loop(const std::vector<RationalCone>& supports, const RationalCone& around) {
    ConeGens g = cone_generators(around);
    std::vector<IVec> jgens = g.rays;
    jgens.insert(jgens.end(), g.lin.begin(), g.lin.end());
    int rank = around.ambient_rank;
    int jdim = cone_dim(around);

    std::vector<char> contains_locus;
    for (const RationalCone& s : supports) contains_locus.push_back(cone_subset(around, s) ? 1 : 0);

    SplitMix64 rng(fnv1a(cone_key(around)) ^ 0x5ca77e21ull);
    for (int attempt = 0; attempt < 128; ++attempt) {
        // base point: positive combination of ray generators, signed mix of lineality
        QVec base(static_cast<size_t>(rank), Rat(0));
        for (size_t i = 0; i < g.rays.size(); ++i) {
            Int c = Int(attempt == 0 ? 1 : rng.range(1, 7));
            for (int t = 0; t < rank; ++t) base[t] += Rat(c * g.rays[i][t]);
        }
        for (size_t i = 0; i < g.lin.size(); ++i) {
            Int c = Int(attempt == 0 ? (i % 2 == 0 ? 1 : 2) : rng.range(-7, 7));
            for (int t = 0; t < rank; ++t) base[t] += Rat(c * g.lin[i][t]);
        }
        bool base_ok = true;
        for (size_t wi = 0; wi < supports.size(); ++wi) {
            bool contains = cone_contains(supports[wi], base);
            if (contains != (contains_locus[wi] == 1)) {
                base_ok = false;
                break;
            }
        }
        if (!base_ok) continue;

        for (int ptry = 0; ptry < 16; ++ptry) {
            IVec u(static_cast<size_t>(rank), Int(0)), w(static_cast<size_t>(rank), Int(0));
            if (attempt == 0 && ptry == 0 && jdim + 2 == rank) {
                // prefer coordinate directions complementary to the locus span
                std::vector<IVec> span = jgens;
                int found = 0;
                for (int i = 0; i < rank && found < 2; ++i) {
                    IVec e = basis_vector(rank, i);
                    std::vector<IVec> test = span;
                    test.push_back(e);
                    if (rank_of(IMat::from_rows(test, rank)) == jdim + found + 1) {
                        (found == 0 ? u : w) = e;
                        span.push_back(e);
                        ++found;
                    }
                }
                if (found < 2) continue;
            } else {
                for (int t = 0; t < rank; ++t) u[t] = Int(rng.range(-4, 4));
                for (int t = 0; t < rank; ++t) w[t] = Int(rng.range(-4, 4));
                if (is_zero(u) || is_zero(w)) continue;
                std::vector<IVec> test = jgens;
                test.push_back(u);
                test.push_back(w);
                if (rank_of(IMat::from_rows(test, rank)) != jdim + 2) continue;
            }
            LoopSpec loop{base, u, w, {Int(1), Int(0)}};
            try {
                std::vector<GeometricCrossing> crossings = loop_geometric_crossings(supports, loop);
                // pick a start direction off every crossing ray
                const PlaneVec starts[] = {{Int(1), Int(0)},  {Int(1), Int(1)}, {Int(2), Int(1)},
                                           {Int(1), Int(2)},  {Int(3), Int(1)}, {Int(1), Int(3)},
                                           {Int(3), Int(2)},  {Int(2), Int(3)}, {Int(5), Int(1)},
                                           {Int(5), Int(2)}};
                for (const PlaneVec& s : starts) {
                    bool clash = false;
                    for (const GeometricCrossing& c : crossings)
                        if (plane_cross(c.ray, s) == 0 &&
                            c.ray.first * s.first + c.ray.second * s.second > 0)
                            clash = true;
                    if (!clash) {
                        loop.start = s;
                        return loop;
                    }
                }
            } catch (const NonTransversalPathError&) {
                continue;
            }
        }
    }
    throw NonTransversalPathError("make_transversal_loop: no transversal plane found");
}

LoopSpec make_joint_loop(const ScatteringDiagram& d, const RationalCone& jt) {
    std::vector<RationalCone> supports;
    for (const Wall& w : d.walls)
        if (!w.function->is_one()) supports.push_back(w.support);
    return make_transversal_loop(supports, jt);
}

std::vector<RationalCone> enumerate_joints(const ScatteringDiagram& d) {
    std::vector<const Wall*> walls;
    for (const Wall& w : d.walls)
        if (!w.function->is_one()) walls.push_back(&w);
    std::map<std::string, RationalCone> joints;
    for (size_t i = 0; i < walls.size(); ++i) {
        for (size_t j = i + 1; j < walls.size(); ++j) {
            std::optional<RationalCone> jt = joint(walls[i]->support, walls[j]->support);
            if (jt) joints.emplace(cone_key(*jt), *jt);
        }
        for (RationalCone& f : cone_facets(walls[i]->support)) joints.emplace(cone_key(f), f);
    }
    std::vector<RationalCone> out;
    for (auto& [k, c] : joints) out.push_back(c);
    return out;
}

ConsistencyReport is_consistent(const ScatteringDiagram& d) {
    validate_diagram(d);
    ConsistencyReport rep;
    for (const RationalCone& jt : enumerate_joints(d)) {
        LoopSpec loop = make_joint_loop(d, jt);
        AutomorphismDescriptor p = path_ordered_product(d, loop);
        JointDefect defect;
        defect.joint = jt;
        bool bad = false;
        for (int i = 0; i < d.ambient_rank; ++i) {
            IVec e = basis_vector(d.ambient_rank, i);
            TruncatedSeries img = p.apply_to_monomial(e);
            TruncatedSeries u = mul(img, TruncatedSeries::monomial(d.context, d.ambient_rank, d.order,
                                                                   Rat(1), ivec_neg(e),
                                                                   QExp(static_cast<size_t>(d.context.q_rank), 0)));
            TruncatedSeries eps = u - TruncatedSeries::one(d.context, d.ambient_rank, d.order);
            if (!eps.is_zero()) bad = true;
            defect.defect.push_back(std::move(eps));
        }
        if (bad) {
            rep.consistent = false;
            rep.failures.push_back(std::move(defect));
        }
    }
    return rep;
}

bool equivalent(const ScatteringDiagram& d1, const ScatteringDiagram& d2) {
    if (d1.ambient_rank != d2.ambient_rank) throw DimensionError("equivalent: ambient rank mismatch");
    if (d1.context != d2.context) throw DomainError("equivalent: monoid context mismatch");
    if (d1.order != d2.order) throw DomainError("equivalent: truncation order mismatch");
    int rank = d1.ambient_rank;

    struct GroupEntry {
        const Wall* wall;
        int which;
    };
    std::map<std::string, std::vector<GroupEntry>> groups;
    std::vector<IVec> group_normals;
    auto add = [&](const ScatteringDiagram& d, int which) {
        for (const Wall& w : d.walls) {
            if (w.function->is_one()) continue;
            IVec n = sign_canonical(w.normal);
            std::string key = ivec_str(n);
            if (groups.find(key) == groups.end()) group_normals.push_back(n);
            groups[key].push_back(GroupEntry{&w, which});
        }
    };
    add(d1, 1);
    add(d2, 2);

    for (auto& [key, entries] : groups) {
        IVec n;
        for (const IVec& gn : group_normals)
            if (ivec_str(gn) == key) n = gn;
        std::vector<IVec> hbasis = kernel_basis({n}, rank);  // rank-1 vectors
        int hdim = static_cast<int>(hbasis.size());
        // restricted inequality functionals
        std::vector<IVec> funcs;
        for (const GroupEntry& e : entries)
            for (const IVec& a : e.wall->support.ineqs) {
                IVec phi(static_cast<size_t>(hdim));
                for (int j = 0; j < hdim; ++j) phi[j] = pairing(a, hbasis[j]);
                if (is_zero(phi)) continue;
                phi = sign_canonical(primitive(phi));
                bool dup = false;
                for (const IVec& f : funcs)
                    if (ivec_cmp(f, phi) == 0) dup = true;
                if (!dup) funcs.push_back(phi);
            }
        // full-dimensional cells of the arrangement in H-coordinates
        std::vector<RationalCone> cells{RationalCone::full(hdim)};
        for (const IVec& phi : funcs) {
            std::vector<RationalCone> next;
            for (const RationalCone& cell : cells) {
                for (int sgn = 0; sgn < 2; ++sgn) {
                    RationalCone c = cell;
                    c.ineqs.push_back(sgn == 0 ? phi : ivec_neg(phi));
                    c = cone_canonicalize(c);
                    if (cone_dim(c) == hdim) next.push_back(std::move(c));
                }
            }
            cells = std::move(next);
        }
        for (const RationalCone& cell : cells) {
            // relint sample, nudged off every other span hyperplane
            ConeGens cg = cone_generators(cell);
            SplitMix64 rng(fnv1a(key + cone_key(cell)));
            QVec sample_amb;
            bool found = false;
            for (int attempt = 0; attempt < 64 && !found; ++attempt) {
                QVec xh(static_cast<size_t>(hdim), Rat(0));
                bool nonzero = false;
                for (const IVec& r : cg.rays) {
                    Int c = Int(attempt == 0 ? 1 : rng.range(1, 9));
                    for (int j = 0; j < hdim; ++j) xh[j] += Rat(c * r[j]);
                    nonzero = true;
                }
                for (const IVec& l : cg.lin) {
                    Int c = Int(attempt == 0 ? 1 : rng.range(-9, 9));
                    if (c == 0) c = 1;
                    for (int j = 0; j < hdim; ++j) xh[j] += Rat(c * l[j]);
                    nonzero = true;
                }
                if (!nonzero) break;  // cell is {0}: not full-dimensional anyway
                QVec x(static_cast<size_t>(rank), Rat(0));
                for (int j = 0; j < hdim; ++j)
                    for (int t = 0; t < rank; ++t) x[t] += xh[j] * Rat(hbasis[j][t]);
                bool clean = cone_relint_contains(cell, xh);
                for (const IVec& gn : group_normals) {
                    if (ivec_str(gn) == key) continue;
                    if (pairing_q(gn, x) == 0) clean = false;
                }
                if (clean) {
                    sample_amb = x;
                    found = true;
                }
            }
            if (!found) throw DomainError("equivalent: could not sample a generic cell point");
            TruncatedSeries p1 = TruncatedSeries::one(d1.context, rank, d1.order);
            TruncatedSeries p2 = p1;
            for (const GroupEntry& e : entries) {
                if (!cone_contains(e.wall->support, sample_amb)) continue;
                if (e.which == 1)
                    p1 = mul(p1, *e.wall->function);
                else
                    p2 = mul(p2, *e.wall->function);
            }
            if (!(p1 == p2)) return false;
        }
    }
    return true;
}

std::optional<CWallView> c_wall_view(const Wall& w, const LatticeMap& p1) {
    for (int sgn = 0; sgn < 2; ++sgn) {
        IVec n = sgn == 0 ? w.normal : ivec_neg(w.normal);
        IVec pn = p1.apply(n);
        if (is_zero(pn)) continue;
        bool ok = true;
        for (const auto& [k, c] : w.function->terms()) {
            if (is_zero(k.m_exp)) continue;
            // m_exp = j * pn with integer j >= 1
            std::optional<IVec> coords = in_span_coordinates({pn}, k.m_exp);
            if (!coords || (*coords)[0] < 1) {
                ok = false;
                break;
            }
        }
        if (ok) return CWallView{w, n};
    }
    return std::nullopt;
}

bool c_wall_incoming(const CWallView& v, const LatticeMap& p1) {
    return cone_contains(v.wall.support, p1.apply(v.c_normal));
}

}  // namespace scatter
