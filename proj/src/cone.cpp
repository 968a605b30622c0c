#include "scatter/cone.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace scatter {

namespace {

// Canonical coset representative of r modulo the rational span of lin:
// orthogonal projection onto lin-perp, cleared to a primitive integer vector.
IVec project_mod_span(const IVec& r, const std::vector<IVec>& lin) {
    if (lin.empty()) return is_zero(r) ? r : primitive(r);
    int k = static_cast<int>(lin.size());
    // solve (L L^T) c = L r
    std::vector<std::vector<Rat>> M(k, std::vector<Rat>(k + 1, Rat(0)));
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) M[i][j] = Rat(pairing(lin[i], lin[j]));
        M[i][k] = Rat(pairing(lin[i], r));
    }
    for (int c = 0; c < k; ++c) {
        int piv = -1;
        for (int i = c; i < k; ++i)
            if (M[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) throw DomainError("project_mod_span: dependent lineality basis");
        std::swap(M[piv], M[c]);
        Rat d = M[c][c];
        for (int j = 0; j <= k; ++j) M[c][j] /= d;
        for (int i = 0; i < k; ++i) {
            if (i == c || M[i][c] == 0) continue;
            Rat f = M[i][c];
            for (int j = 0; j <= k; ++j) M[i][j] -= f * M[c][j];
        }
    }
    QVec res(r.size());
    for (size_t t = 0; t < r.size(); ++t) {
        res[t] = Rat(r[t]);
        for (int i = 0; i < k; ++i) res[t] -= M[i][k] * Rat(lin[i][t]);
    }
    bool zero = true;
    for (const Rat& x : res)
        if (x != 0) zero = false;
    if (zero) return IVec(r.size(), Int(0));
    return primitive_of_rational(res);
}

int span_rank(const std::vector<IVec>& vecs, int ambient) {
    if (vecs.empty()) return 0;
    return rank_of(IMat::from_rows(vecs, ambient));
}

// Double description with per-step extreme-ray pruning. Constraints are
// processed one inequality at a time; the invariant is that `rays` is the
// exact set of extreme rays (mod lineality) of the intermediate cone.
ConeGens dd_generators(int rank, const std::vector<IVec>& eqs, const std::vector<IVec>& ineqs) {
    std::vector<IVec> lin = kernel_basis(eqs, rank);
    std::vector<IVec> rays;

    std::vector<IVec> processed;  // eqs plus handled inequalities
    processed.insert(processed.end(), eqs.begin(), eqs.end());

    auto prune = [&](std::vector<IVec>& rs) {
        // lineality of the intermediate cone
        std::vector<IVec> all_eq = processed;
        int lin_dim = rank - span_rank(all_eq, rank);
        std::vector<IVec> out;
        std::vector<IVec> seen;
        for (const IVec& r : rs) {
            if (is_zero(r)) continue;
            IVec rep = project_mod_span(r, lin);
            if (is_zero(rep)) continue;  // inside lineality span
            bool dup = false;
            for (const IVec& s : seen)
                if (ivec_cmp(s, rep) == 0) {
                    dup = true;
                    break;
                }
            if (dup) continue;
            // minimal-face dimension test
            std::vector<IVec> active = eqs;
            for (const IVec& b : processed) {
                bool is_eq = false;
                for (const IVec& e : eqs)
                    if (ivec_cmp(e, b) == 0) is_eq = true;
                if (!is_eq && pairing(b, r) == 0) active.push_back(b);
            }
            // dedupe handled implicitly by rank computation
            int face_dim = rank - span_rank(active, rank);
            if (face_dim != lin_dim + 1) continue;
            seen.push_back(rep);
            out.push_back(primitive(r));
        }
        rs = std::move(out);
    };

    for (const IVec& b : ineqs) {
        Int bl0 = 0;
        int l0_idx = -1;
        for (size_t i = 0; i < lin.size(); ++i) {
            Int v = pairing(b, lin[i]);
            if (v != 0) {
                l0_idx = static_cast<int>(i);
                bl0 = v;
                break;
            }
        }
        if (l0_idx >= 0) {
            IVec l0 = lin[static_cast<size_t>(l0_idx)];
            if (bl0 < 0) {
                l0 = ivec_neg(l0);
                bl0 = -bl0;
            }
            std::vector<IVec> new_lin;
            for (size_t i = 0; i < lin.size(); ++i) {
                if (static_cast<int>(i) == l0_idx) continue;
                Int bl = pairing(b, lin[i]);
                IVec l = ivec_sub(ivec_scale(lin[i], bl0), ivec_scale(l0, bl));
                if (!is_zero(l)) new_lin.push_back(primitive(l));
            }
            std::vector<IVec> new_rays;
            for (const IVec& r : rays) {
                Int br = pairing(b, r);
                IVec nr = ivec_sub(ivec_scale(r, bl0), ivec_scale(l0, br));
                if (!is_zero(nr)) new_rays.push_back(primitive(nr));
            }
            new_rays.push_back(l0);
            lin = std::move(new_lin);
            rays = std::move(new_rays);
        } else {
            std::vector<IVec> plus, zero, minus;
            std::vector<Int> pv, mv;
            for (const IVec& r : rays) {
                Int v = pairing(b, r);
                if (v > 0) {
                    plus.push_back(r);
                    pv.push_back(v);
                } else if (v < 0) {
                    minus.push_back(r);
                    mv.push_back(v);
                } else {
                    zero.push_back(r);
                }
            }
            std::vector<IVec> new_rays = plus;
            new_rays.insert(new_rays.end(), zero.begin(), zero.end());
            for (size_t i = 0; i < plus.size(); ++i)
                for (size_t j = 0; j < minus.size(); ++j) {
                    IVec w = ivec_sub(ivec_scale(minus[j], pv[i]), ivec_scale(plus[i], mv[j]));
                    if (!is_zero(w)) new_rays.push_back(primitive(w));
                }
            rays = std::move(new_rays);
        }
        processed.push_back(b);
        prune(rays);
    }
    prune(rays);
    std::sort(rays.begin(), rays.end(), [](const IVec& a, const IVec& b) { return ivec_cmp(a, b) < 0; });
    return {rays, lin};
}

}  // namespace

ConeGens cone_generators(const RationalCone& c) {
    return dd_generators(c.ambient_rank, c.eqs, c.ineqs);
}

RationalCone cone_from_generators(int rank, const std::vector<IVec>& rays,
                                  const std::vector<IVec>& lin) {
    std::vector<IVec> all = rays;
    all.insert(all.end(), lin.begin(), lin.end());
    std::vector<IVec> eqs = hnf_basis(kernel_basis(all, rank), rank);
    // facets: extreme rays of the dual cone {y : <y, ray> >= 0, <y, lin> = 0}
    std::vector<IVec> dual_eqs = lin;
    ConeGens dual = dd_generators(rank, dual_eqs, rays);
    std::vector<IVec> ineqs;
    for (const IVec& f : dual.rays) {
        IVec rep = project_mod_span(f, eqs);
        if (!is_zero(rep)) ineqs.push_back(rep);
    }
    std::sort(ineqs.begin(), ineqs.end(), [](const IVec& a, const IVec& b) { return ivec_cmp(a, b) < 0; });
    ineqs.erase(std::unique(ineqs.begin(), ineqs.end(),
                            [](const IVec& a, const IVec& b) { return ivec_cmp(a, b) == 0; }),
                ineqs.end());
    return RationalCone::from_constraints(rank, std::move(eqs), std::move(ineqs));
}

RationalCone cone_canonicalize(const RationalCone& c) {
    ConeGens g = cone_generators(c);
    return cone_from_generators(c.ambient_rank, g.rays, g.lin);
}

int cone_dim(const RationalCone& c) {
    ConeGens g = cone_generators(c);
    std::vector<IVec> all = g.rays;
    all.insert(all.end(), g.lin.begin(), g.lin.end());
    return span_rank(all, c.ambient_rank);
}

std::vector<IVec> cone_lineality(const RationalCone& c) {
    std::vector<IVec> all = c.eqs;
    all.insert(all.end(), c.ineqs.begin(), c.ineqs.end());
    return kernel_basis(all, c.ambient_rank);
}

bool cone_contains(const RationalCone& c, const IVec& x) {
    for (const IVec& e : c.eqs)
        if (pairing(e, x) != 0) return false;
    for (const IVec& b : c.ineqs)
        if (pairing(b, x) < 0) return false;
    return true;
}

bool cone_contains(const RationalCone& c, const QVec& x) {
    for (const IVec& e : c.eqs)
        if (pairing_q(e, x) != 0) return false;
    for (const IVec& b : c.ineqs)
        if (pairing_q(b, x) < 0) return false;
    return true;
}

// assumes canonical constraint form (no inequality vanishing on all of c)
bool cone_relint_contains(const RationalCone& c, const QVec& x) {
    for (const IVec& e : c.eqs)
        if (pairing_q(e, x) != 0) return false;
    for (const IVec& b : c.ineqs)
        if (pairing_q(b, x) <= 0) return false;
    return true;
}

QVec cone_relint_point(const RationalCone& c) {
    ConeGens g = cone_generators(c);
    QVec p(static_cast<size_t>(c.ambient_rank), Rat(0));
    for (const IVec& r : g.rays)
        for (int i = 0; i < c.ambient_rank; ++i) p[i] += Rat(r[i]);
    return p;
}

bool cone_equal(const RationalCone& a, const RationalCone& b) {
    return cone_key(a) == cone_key(b);
}

bool cone_subset(const RationalCone& a, const RationalCone& b) {
    ConeGens g = cone_generators(a);
    for (const IVec& r : g.rays)
        if (!cone_contains(b, r)) return false;
    for (const IVec& l : g.lin) {
        if (!cone_contains(b, l)) return false;
        if (!cone_contains(b, ivec_neg(l))) return false;
    }
    return true;
}

bool cone_equal_by_generators(const RationalCone& a, const RationalCone& b) {
    return cone_subset(a, b) && cone_subset(b, a);
}

RationalCone cone_intersect(const RationalCone& a, const RationalCone& b) {
    if (a.ambient_rank != b.ambient_rank) throw DimensionError("cone_intersect: rank mismatch");
    std::vector<IVec> eqs = a.eqs;
    eqs.insert(eqs.end(), b.eqs.begin(), b.eqs.end());
    std::vector<IVec> ineqs = a.ineqs;
    ineqs.insert(ineqs.end(), b.ineqs.begin(), b.ineqs.end());
    return cone_canonicalize(RationalCone::from_constraints(a.ambient_rank, eqs, ineqs));
}

RationalCone cone_ray_sum(const RationalCone& c, const IVec& v) {
    ConeGens g = cone_generators(c);
    std::vector<IVec> rays = g.rays;
    rays.push_back(primitive(v));
    return cone_from_generators(c.ambient_rank, rays, g.lin);
}

std::string cone_key(const RationalCone& c) {
    ConeGens g = cone_generators(c);
    std::vector<IVec> lin_rows = hnf_basis(g.lin, c.ambient_rank);
    std::vector<IVec> reps;
    for (const IVec& r : g.rays) reps.push_back(project_mod_span(r, g.lin));
    std::sort(reps.begin(), reps.end(), [](const IVec& a, const IVec& b) { return ivec_cmp(a, b) < 0; });
    std::ostringstream os;
    os << c.ambient_rank << "|L";
    for (const IVec& l : lin_rows) os << ivec_str(l);
    os << "|R";
    for (const IVec& r : reps) os << ivec_str(r);
    return os.str();
}

std::optional<RationalCone> joint(const RationalCone& w1, const RationalCone& w2) {
    if (w1.ambient_rank != w2.ambient_rank) throw DimensionError("joint: rank mismatch");
    if (cone_dim(w1) != w1.ambient_rank - 1 || cone_dim(w2) != w2.ambient_rank - 1)
        throw DimensionError("joint: cones must have codimension one");
    RationalCone j = cone_intersect(w1, w2);
    if (cone_dim(j) != w1.ambient_rank - 2) return std::nullopt;
    return j;
}

std::vector<RationalCone> cone_facets(const RationalCone& c) {
    RationalCone cc = cone_canonicalize(c);
    std::vector<RationalCone> out;
    for (size_t i = 0; i < cc.ineqs.size(); ++i) {
        std::vector<IVec> eqs = cc.eqs;
        eqs.push_back(cc.ineqs[i]);
        std::vector<IVec> ineqs;
        for (size_t j = 0; j < cc.ineqs.size(); ++j)
            if (j != i) ineqs.push_back(cc.ineqs[j]);
        RationalCone f =
            cone_canonicalize(RationalCone::from_constraints(cc.ambient_rank, eqs, ineqs));
        if (cone_dim(f) != cc.ambient_rank - 2) continue;
        bool dup = false;
        for (const RationalCone& o : out)
            if (cone_equal(f, o)) dup = true;
        if (!dup) out.push_back(f);
    }
    return out;
}

std::vector<RayCrossing> cone_ray_crossings(const RationalCone& c, const QVec& base,
                                            const IVec& dir) {
    if (is_zero(dir)) throw DomainError("cone_ray_crossings: zero direction");
    if (static_cast<int>(base.size()) != c.ambient_rank ||
        static_cast<int>(dir.size()) != c.ambient_rank)
        throw DimensionError("cone_ray_crossings: rank mismatch");
    RationalCone cc = cone_canonicalize(c);
    if (cc.eqs.empty()) return {};  // full-dimensional: no isolated transversal crossing
    bool tangent = true;
    std::optional<Rat> s;
    for (const IVec& e : cc.eqs) {
        Rat ed = Rat(pairing(e, dir));
        Rat eb = pairing_q(e, base);
        if (ed == 0) {
            if (eb != 0) return {};  // parallel, off the span
            continue;
        }
        tangent = false;
        Rat cand = -eb / ed;
        if (s && *s != cand) return {};
        s = cand;
    }
    if (tangent) return {};  // travelling inside the span: no isolated crossing
    if (!s || *s <= 0) return {};
    QVec pt(base.size());
    for (size_t i = 0; i < base.size(); ++i) pt[i] = base[i] + *s * Rat(dir[i]);
    if (!cone_relint_contains(cc, pt)) return {};
    return {{*s, true}};
}

}  // namespace scatter
