#include "scatter/cluster.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace scatter {

namespace {

IVec basis_vector(int rank, int i) {
    IVec e(static_cast<size_t>(rank), Int(0));
    e[i] = 1;
    return e;
}

std::string var_name(int i) { return "t" + std::to_string(i + 1); }

// unimodular integer inverse by row reduction
IMat unimodular_inverse(IMat w) {
    int n = w.rows;
    IMat inv = IMat::identity(n);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int i = c; i < n; ++i)
            if (w(i, c) != 0) {
                piv = i;
                break;
            }
        if (piv < 0) throw DomainError("unimodular_inverse: singular matrix");
        for (int j = 0; j < n; ++j) std::swap(w(piv, j), w(c, j));
        for (int j = 0; j < n; ++j) std::swap(inv(piv, j), inv(c, j));
        for (int i = c + 1; i < n; ++i) {
            while (w(i, c) != 0) {
                Int q = w(c, c) / w(i, c);
                for (int j = 0; j < n; ++j) w(c, j) -= q * w(i, j);
                for (int j = 0; j < n; ++j) inv(c, j) -= q * inv(i, j);
                for (int j = 0; j < n; ++j) std::swap(w(c, j), w(i, j));
                for (int j = 0; j < n; ++j) std::swap(inv(c, j), inv(i, j));
            }
        }
        if (w(c, c) < 0) {
            for (int j = 0; j < n; ++j) w(c, j) = -w(c, j);
            for (int j = 0; j < n; ++j) inv(c, j) = -inv(c, j);
        }
    }
    for (int c = n - 1; c >= 0; --c) {
        if (w(c, c) != 1) throw DomainError("unimodular_inverse: matrix not unimodular");
        for (int i = 0; i < c; ++i) {
            Int q = w(i, c);
            if (q != 0) {
                for (int j = 0; j < n; ++j) w(i, j) -= q * w(c, j);
                for (int j = 0; j < n; ++j) inv(i, j) -= q * inv(c, j);
            }
        }
    }
    return inv;
}

}  // namespace

Seed make_seed(SkewForm skew, std::vector<int> unfrozen) {
    Seed s;
    s.rank = skew.rank();
    s.skew = std::move(skew);
    std::sort(unfrozen.begin(), unfrozen.end());
    unfrozen.erase(std::unique(unfrozen.begin(), unfrozen.end()), unfrozen.end());
    for (int i : unfrozen)
        if (i < 0 || i >= s.rank) throw DomainError("make_seed: unfrozen index out of range");
    s.unfrozen = std::move(unfrozen);
    for (int i : s.unfrozen) {
        IVec v = s.skew.m.row(i);
        if (is_zero(v)) throw AssumptionError("make_seed: v_i = 0 for an unfrozen index");
    }
    return s;
}

LatticeMap p1_map(const Seed& s) {
    // p1(n)_j = {n, e_j} = sum_i n_i {e_i, e_j}; matrix is skew^T
    return LatticeMap(s.skew.m.transpose());
}

LatticeMap p_map(const Seed& s) { return p1_map(s); }

std::vector<IVec> v_vectors(const Seed& s) {
    std::vector<IVec> out;
    for (int i = 0; i < s.rank; ++i) out.push_back(s.skew.m.row(i));
    return out;
}

PrincipalSeed principal_seed(const Seed& s) {
    int n = s.rank;
    IMat m(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = s.skew.m(i, j);
    for (int i = 0; i < n; ++i) {
        m(i, n + i) = 1;
        m(n + i, i) = -1;
    }
    PrincipalSeed ps;
    ps.base = s;
    ps.principal = make_seed(SkewForm(m), s.unfrozen);
    return ps;
}

AssumptionReport check_assumptions(const Seed& s) {
    AssumptionReport rep;
    std::vector<IVec> vs = v_vectors(s);
    rep.x_ok = true;
    std::vector<IVec> rays;
    for (int i : s.unfrozen) {
        if (ivec_gcd(vs[i]) != 1) rep.x_ok = false;
        rays.push_back(primitive(vs[i]));
    }
    for (size_t a = 0; a < rays.size() && rep.x_ok; ++a)
        for (size_t b = a + 1; b < rays.size(); ++b)
            if (ivec_cmp(rays[a], rays[b]) == 0) rep.x_ok = false;
    // injectivity of p1 restricted to N_uf
    std::vector<IVec> images;
    for (int i : s.unfrozen) images.push_back(vs[i]);
    rep.injective = images.empty() ||
                    rank_of(IMat::from_rows(images, s.rank)) == static_cast<int>(images.size());
    rep.coprime_note = "total coprimality is not verified by this engine";
    return rep;
}

MonoidContext seed_context(const Seed& s) {
    std::vector<std::string> names;
    for (size_t a = 0; a < s.unfrozen.size(); ++a) names.push_back(var_name(s.unfrozen[a]));
    return MonoidContext::free_monoid(names);
}

DiagramKind diagram_kind_from_string(const std::string& s) {
    if (s == "cluster") return DiagramKind::Cluster;
    if (s == "aprin") return DiagramKind::APrin;
    if (s == "xprin") return DiagramKind::XPrin;
    if (s == "hdtv_x") return DiagramKind::HdtvX;
    if (s == "hdtv_a") return DiagramKind::HdtvA;
    if (s == "hdtv_a_restricted") return DiagramKind::HdtvARestricted;
    throw DomainError("unknown diagram kind: " + s);
}

std::string diagram_kind_name(DiagramKind k) {
    switch (k) {
        case DiagramKind::Cluster: return "cluster";
        case DiagramKind::APrin: return "aprin";
        case DiagramKind::XPrin: return "xprin";
        case DiagramKind::HdtvX: return "hdtv_x";
        case DiagramKind::HdtvA: return "hdtv_a";
        case DiagramKind::HdtvARestricted: return "hdtv_a_restricted";
    }
    throw DomainError("unknown diagram kind");
}

ScatteringDiagram initial_diagram(const Seed& s, DiagramKind kind, int order) {
    AssumptionReport rep = check_assumptions(s);
    std::vector<IVec> vs = v_vectors(s);
    ScatteringDiagram d;
    d.order = order;

    switch (kind) {
        case DiagramKind::Cluster:
        case DiagramKind::HdtvX: {
            if (!rep.injective)
                throw AssumptionError("initial_diagram: p1 not injective on N_uf");
            if (kind == DiagramKind::HdtvX && !rep.x_ok) {
                std::string why;
                for (int i : s.unfrozen)
                    if (ivec_gcd(vs[i]) != 1) why = "v" + std::to_string(i + 1) + " not primitive";
                if (why.empty()) why = "v-rays not pairwise distinct";
                throw AssumptionError("initial_diagram: X assumptions fail (" + why + ")");
            }
            d.ambient_rank = s.rank;
            d.context = seed_context(s);
            for (size_t a = 0; a < s.unfrozen.size(); ++a) {
                int i = s.unfrozen[a];
                TruncatedSeries f = TruncatedSeries::one(d.context, s.rank, order);
                QExp q(s.unfrozen.size(), 0);
                q[a] = 1;
                f.add_term(Rat(1), vs[i], q);
                d.walls.push_back(make_wall(RationalCone::hyperplane(basis_vector(s.rank, i)), f));
            }
            break;
        }
        case DiagramKind::APrin: {
            int n = s.rank;
            d.ambient_rank = 2 * n;
            d.context = seed_context(s);
            for (size_t a = 0; a < s.unfrozen.size(); ++a) {
                int i = s.unfrozen[a];
                // monomial z^{(v_i, e_i)} in M + N coordinates
                IVec mono(static_cast<size_t>(2 * n), Int(0));
                for (int j = 0; j < n; ++j) mono[j] = vs[i][j];
                mono[n + i] = 1;
                TruncatedSeries f = TruncatedSeries::one(d.context, 2 * n, order);
                QExp q(s.unfrozen.size(), 0);
                q[a] = 1;
                f.add_term(Rat(1), mono, q);
                d.walls.push_back(
                    make_wall(RationalCone::hyperplane(basis_vector(2 * n, i)), f));
            }
            break;
        }
        case DiagramKind::XPrin:
        case DiagramKind::HdtvARestricted: {
            d.ambient_rank = s.rank;
            d.context = seed_context(s);
            for (size_t a = 0; a < s.unfrozen.size(); ++a) {
                int i = s.unfrozen[a];
                auto [vprim, div] = primitive_part(vs[i]);
                TruncatedSeries f = TruncatedSeries::one(d.context, s.rank, order);
                QExp q(s.unfrozen.size(), 0);
                q[a] = 1;
                f.add_term(Rat(1), basis_vector(s.rank, i), q);
                f = int_pow(f, static_cast<long>(div));
                d.walls.push_back(make_wall(RationalCone::hyperplane(vprim), f));
            }
            break;
        }
        case DiagramKind::HdtvA: {
            d.ambient_rank = s.rank;
            std::vector<std::string> names;
            std::vector<std::pair<int, Int>> divs;
            for (int i : s.unfrozen) {
                Int div = primitive_part(vs[i]).second;
                divs.emplace_back(i, div);
                for (Int j = 1; j <= div; ++j)
                    names.push_back("t" + std::to_string(i + 1) + std::to_string(static_cast<long>(j)));
            }
            d.context = MonoidContext::free_monoid(names);
            size_t var = 0;
            for (auto& [i, div] : divs) {
                IVec vprim = primitive(vs[i]);
                TruncatedSeries f = TruncatedSeries::one(d.context, s.rank, order);
                for (Int j = 1; j <= div; ++j) {
                    TruncatedSeries factor = TruncatedSeries::one(d.context, s.rank, order);
                    QExp q(names.size(), 0);
                    q[var++] = 1;
                    factor.add_term(Rat(1), basis_vector(s.rank, i), q);
                    f = mul(f, factor);
                }
                d.walls.push_back(make_wall(RationalCone::hyperplane(vprim), f));
            }
            break;
        }
    }
    validate_diagram(d);
    return d;
}

namespace {

// checks the C_prin shape of a wall over M + N and returns its span normal n
// with wall span = (n, 0)-perp
IVec cprin_wall_normal(const Wall& w, int n) {
    for (int j = n; j < 2 * n; ++j)
        if (w.normal[j] != 0)
            throw DomainError("psi: wall span normal has a nonzero M-part (not C_prin)");
    // N_R-invariance: every canonical constraint kills {0} + N_R
    for (const IVec& e : w.support.eqs)
        for (int j = n; j < 2 * n; ++j)
            if (e[j] != 0) throw DomainError("psi: wall support not N_R-invariant");
    for (const IVec& b : w.support.ineqs)
        for (int j = n; j < 2 * n; ++j)
            if (b[j] != 0) throw DomainError("psi: wall support not N_R-invariant");
    IVec nn(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) nn[j] = w.normal[j];
    return nn;
}

}  // namespace

ScatteringDiagram psi(const ScatteringDiagram& d, const Seed& s) {
    int n = s.rank;
    if (d.ambient_rank != 2 * n) throw DimensionError("psi: diagram not over M + N");
    ScatteringDiagram out;
    out.ambient_rank = n;
    out.context = d.context;
    out.order = d.order;
    for (const Wall& w : d.walls) {
        cprin_wall_normal(w, n);
        // function terms t^beta z^{(m', n')} with n' = sum beta_a e_{i_a}
        TruncatedSeries f(out.context, n, d.order);
        for (const auto& [k, c] : w.function->terms()) {
            IVec expect_n(static_cast<size_t>(n), Int(0));
            for (size_t a = 0; a < s.unfrozen.size(); ++a)
                expect_n[s.unfrozen[a]] += Int(k.q_exp[a]);
            for (int j = 0; j < n; ++j)
                if (k.m_exp[n + j] != expect_n[j])
                    throw DomainError("psi: function exponent N-part disagrees with bookkeeping");
            IVec mpart(static_cast<size_t>(n));
            for (int j = 0; j < n; ++j) mpart[j] = k.m_exp[j];
            f.add_term(c, mpart, k.q_exp);
        }
        std::vector<IVec> eqs, ineqs;
        for (const IVec& e : w.support.eqs) eqs.push_back(IVec(e.begin(), e.begin() + n));
        for (const IVec& b : w.support.ineqs) ineqs.push_back(IVec(b.begin(), b.begin() + n));
        RationalCone supp = RationalCone::from_constraints(n, eqs, ineqs);
        std::optional<IVec> dir;
        if (f.is_one()) dir = IVec(w.direction.begin(), w.direction.begin() + n);
        out.walls.push_back(make_wall(supp, f, dir));
    }
    validate_diagram(out);
    return out;
}

ScatteringDiagram psi_preimage(const ScatteringDiagram& d, const Seed& s) {
    int n = s.rank;
    if (d.ambient_rank != n) throw DimensionError("psi_preimage: diagram not over M");
    ScatteringDiagram out;
    out.ambient_rank = 2 * n;
    out.context = d.context;
    out.order = d.order;
    for (const Wall& w : d.walls) {
        TruncatedSeries f(out.context, 2 * n, d.order);
        for (const auto& [k, c] : w.function->terms()) {
            IVec mono(static_cast<size_t>(2 * n), Int(0));
            for (int j = 0; j < n; ++j) mono[j] = k.m_exp[j];
            for (size_t a = 0; a < s.unfrozen.size(); ++a)
                mono[n + s.unfrozen[a]] += Int(k.q_exp[a]);
            f.add_term(c, mono, k.q_exp);
        }
        auto lift = [&](const IVec& phi) {
            IVec out_phi(static_cast<size_t>(2 * n), Int(0));
            for (int j = 0; j < n; ++j) out_phi[j] = phi[j];
            return out_phi;
        };
        std::vector<IVec> eqs, ineqs;
        for (const IVec& e : w.support.eqs) eqs.push_back(lift(e));
        for (const IVec& b : w.support.ineqs) ineqs.push_back(lift(b));
        RationalCone supp = RationalCone::from_constraints(2 * n, eqs, ineqs);
        std::optional<IVec> dir;
        if (f.is_one()) {
            IVec d2(static_cast<size_t>(2 * n), Int(0));
            for (int j = 0; j < n; ++j) d2[j] = w.direction[j];
            dir = d2;
        }
        out.walls.push_back(make_wall(supp, f, dir));
    }
    validate_diagram(out);
    return out;
}

ScatteringDiagram slice_to_x(const ScatteringDiagram& d, const Seed& s) {
    int n = s.rank;
    if (d.ambient_rank != 2 * n) throw DimensionError("slice_to_x: diagram not over M + N");
    // iota(x) = (p1(x), x) as a (2n x n)-matrix
    IMat p1 = p1_map(s).m;
    IMat iota(2 * n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) iota(i, j) = p1(i, j);
    for (int i = 0; i < n; ++i) iota(n + i, i) = 1;

    ScatteringDiagram out;
    out.ambient_rank = n;
    out.context = d.context;
    out.order = d.order;
    for (const Wall& w : d.walls) {
        auto pull = [&](const IVec& phi) {
            IVec psi_(static_cast<size_t>(n), Int(0));
            for (int j = 0; j < n; ++j)
                for (int i2 = 0; i2 < 2 * n; ++i2) psi_[j] += phi[i2] * iota(i2, j);
            return psi_;
        };
        std::vector<IVec> eqs, ineqs;
        bool degenerate = false;
        for (const IVec& e : w.support.eqs) {
            IVec pe = pull(e);
            if (is_zero(pe)) {
                degenerate = true;
                break;
            }
            eqs.push_back(pe);
        }
        if (degenerate) continue;
        for (const IVec& b : w.support.ineqs) ineqs.push_back(pull(b));
        RationalCone supp = cone_canonicalize(RationalCone::from_constraints(n, eqs, ineqs));
        if (cone_dim(supp) != n - 1) continue;  // dropped by the dimension test

        // divisibility of the pulled-back span normal fixes the exponent
        IVec span_pull = pull(w.normal);
        Int div = ivec_gcd(span_pull);
        if (div == 0) continue;

        TruncatedSeries f(out.context, n, d.order);
        bool bad = false;
        for (const auto& [k, c] : w.function->terms()) {
            IVec npart(static_cast<size_t>(n));
            for (int j = 0; j < n; ++j) npart[j] = k.m_exp[n + j];
            // the monomial must be iota(npart)
            IVec expect = iota.apply(npart);
            if (ivec_cmp(expect, k.m_exp) != 0) {
                bad = true;
                break;
            }
            f.add_term(c, npart, k.q_exp);
        }
        if (bad) throw DomainError("slice_to_x: wall monomial not of the form iota(n)");
        f = int_pow(f, static_cast<long>(div));
        if (f.is_one()) continue;
        out.walls.push_back(make_wall(supp, f));
    }
    validate_diagram(out);
    return normalize(out);
}

ScatteringDiagram fiber_diagram(const ScatteringDiagram& d, const Seed& s) {
    int n = s.rank;
    if (d.ambient_rank != n) throw DimensionError("fiber_diagram: diagram not over M");
    std::vector<IVec> K = kernel_sublattice(p_map(s));
    if (K.empty()) return d;
    // L = K-perp in M, with basis rows B
    std::vector<IVec> B = kernel_basis(K, n);
    int l = static_cast<int>(B.size());

    ScatteringDiagram out;
    out.ambient_rank = l;
    out.context = d.context;
    out.order = d.order;
    for (const Wall& w : d.walls) {
        auto restrict_functional = [&](const IVec& phi) {
            IVec psi_(static_cast<size_t>(l));
            for (int j = 0; j < l; ++j) psi_[j] = pairing(phi, B[j]);
            return psi_;
        };
        std::vector<IVec> eqs, ineqs;
        bool degenerate = false;
        for (const IVec& e : w.support.eqs) {
            IVec pe = restrict_functional(e);
            if (is_zero(pe)) {
                degenerate = true;
                break;
            }
            eqs.push_back(pe);
        }
        if (degenerate) continue;
        for (const IVec& b : w.support.ineqs) ineqs.push_back(restrict_functional(b));
        RationalCone supp = cone_canonicalize(RationalCone::from_constraints(l, eqs, ineqs));
        if (cone_dim(supp) != l - 1) continue;

        TruncatedSeries f(out.context, l, d.order);
        for (const auto& [k, c] : w.function->terms()) {
            if (is_zero(k.m_exp)) {
                f.add_term(c, IVec(static_cast<size_t>(l), Int(0)), k.q_exp);
                continue;
            }
            std::optional<IVec> coords = in_span_coordinates(B, k.m_exp);
            if (!coords)
                throw DomainError("fiber_diagram: wall monomial not in the fiber sublattice");
            f.add_term(c, *coords, k.q_exp);
        }
        if (f.is_one()) continue;
        out.walls.push_back(make_wall(supp, f));
    }
    validate_diagram(out);
    return normalize(out);
}

ScatteringDiagram quotient_diagram(const ScatteringDiagram& d, const Seed& s) {
    int n = s.rank;
    if (d.ambient_rank != n) throw DimensionError("quotient_diagram: diagram not over N");
    std::vector<IVec> K = kernel_sublattice(p_map(s));
    if (K.empty()) return d;
    int k = static_cast<int>(K.size());
    IMat adapted = extend_to_basis(K, n);  // rows: K basis then a complement
    IMat coords = unimodular_inverse(adapted.transpose());  // x -> coordinates in the adapted basis
    int q = n - k;

    ScatteringDiagram out;
    out.ambient_rank = q;
    out.context = d.context;
    out.order = d.order;
    for (const Wall& w : d.walls) {
        // K_R-invariance of the support
        for (const IVec& e : w.support.eqs)
            for (const IVec& kappa : K)
                if (pairing(e, kappa) != 0)
                    throw DomainError("quotient_diagram: wall support not K_R-invariant");
        for (const IVec& b : w.support.ineqs)
            for (const IVec& kappa : K)
                if (pairing(b, kappa) != 0)
                    throw DomainError("quotient_diagram: wall support not K_R-invariant");
        auto push_functional = [&](const IVec& phi) {
            // well-defined on N/K; value on the complement basis
            IVec psi_(static_cast<size_t>(q));
            for (int j = 0; j < q; ++j) psi_[j] = pairing(phi, adapted.row(k + j));
            return psi_;
        };
        std::vector<IVec> eqs, ineqs;
        for (const IVec& e : w.support.eqs) eqs.push_back(push_functional(e));
        for (const IVec& b : w.support.ineqs) ineqs.push_back(push_functional(b));
        RationalCone supp = cone_canonicalize(RationalCone::from_constraints(q, eqs, ineqs));
        if (cone_dim(supp) != q - 1) continue;

        TruncatedSeries f(out.context, q, d.order);
        for (const auto& [key, c] : w.function->terms()) {
            IVec full = coords.apply(key.m_exp);
            IVec img(static_cast<size_t>(q));
            for (int j = 0; j < q; ++j) img[j] = full[k + j];
            f.add_term(c, img, key.q_exp);
        }
        if (f.is_one()) continue;
        out.walls.push_back(make_wall(supp, f));
    }
    validate_diagram(out);
    return normalize(out);
}

ClusterHypersurface cluster_hypersurface(const Seed& s, int i, bool split) {
    int n = s.rank;
    std::vector<IVec> vs = v_vectors(s);
    IVec vi = primitive(vs[i]);
    // quotient M -> M/Zv_i via an adapted basis
    IMat adapted = extend_to_basis({vi}, n);
    IMat coords = unimodular_inverse(adapted.transpose());
    IMat qm(n - 1, n);
    for (int r = 0; r < n - 1; ++r)
        for (int c = 0; c < n; ++c) qm(r, c) = coords(1 + r, c);
    LatticeMap quotient(qm);

    // image of e_i-perp: the functional ebar_i with ebar_i(quotient(x)) = <e_i, x>
    IVec ei = basis_vector(n, i);
    // e_i vanishes on v_i, hence descends: ebar_j = <e_i, adapted_row(1+j)>
    IVec ebar(static_cast<size_t>(n - 1));
    for (int j = 0; j < n - 1; ++j) ebar[j] = pairing(ei, adapted.row(1 + j));
    if (pairing(ei, vi) != 0)
        throw DomainError("cluster_hypersurface: e_i does not vanish on v_i");

    ClusterHypersurface out;
    out.quotient_map = quotient;
    out.hypersurface.quotient_rank = n - 1;
    if (!split || n - 1 < 2) {
        out.hypersurface.cones.push_back(RationalCone::hyperplane(ebar));
        out.hypersurface.weights.push_back(Int(1));
    } else {
        // split the hyperplane by the first independent coordinate functional
        IVec splitter;
        for (int j = 0; j < n - 1; ++j) {
            IVec cand = basis_vector(n - 1, j);
            if (ivec_cmp(primitive(cand), primitive(ebar)) != 0 &&
                ivec_cmp(primitive(cand), primitive(ivec_neg(ebar))) != 0) {
                splitter = cand;
                break;
            }
        }
        out.hypersurface.cones.push_back(
            RationalCone::from_constraints(n - 1, {ebar}, {splitter}));
        out.hypersurface.cones.push_back(
            RationalCone::from_constraints(n - 1, {ebar}, {ivec_neg(splitter)}));
        out.hypersurface.weights.push_back(Int(1));
        out.hypersurface.weights.push_back(Int(1));
    }
    return out;
}

}  // namespace scatter
