#include "scatter/completion.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace scatter {

namespace {

IVec basis_vector(int rank, int i) {
    IVec e(static_cast<size_t>(rank), Int(0));
    e[i] = 1;
    return e;
}

std::vector<RationalCone> codim2_loci(const std::vector<RationalCone>& cones) {
    std::map<std::string, RationalCone> loci;
    for (size_t i = 0; i < cones.size(); ++i) {
        for (size_t j = i + 1; j < cones.size(); ++j) {
            RationalCone meet = cone_intersect(cones[i], cones[j]);
            if (cone_dim(meet) == cones[i].ambient_rank - 2) loci.emplace(cone_key(meet), meet);
        }
        for (RationalCone& f : cone_facets(cones[i])) loci.emplace(cone_key(f), f);
    }
    std::vector<RationalCone> out;
    for (auto& [k, c] : loci) out.push_back(c);
    return out;
}

}  // namespace

BalancingReport check_balancing(const TropicalHypersurface& t) {
    BalancingReport rep;
    std::vector<RationalCone> cones;
    std::vector<Int> weights;
    for (size_t i = 0; i < t.cones.size(); ++i) {
        if (t.weights[i] == 0) continue;
        RationalCone c = cone_canonicalize(t.cones[i]);
        if (cone_dim(c) != t.quotient_rank - 1)
            throw DomainError("check_balancing: hypersurface cone not of codimension one");
        cones.push_back(std::move(c));
        weights.push_back(t.weights[i]);
    }
    for (const RationalCone& omega : codim2_loci(cones)) {
        LoopSpec loop = make_transversal_loop(cones, omega);
        std::vector<GeometricCrossing> crossings = loop_geometric_crossings(cones, loop);
        IVec sum(static_cast<size_t>(t.quotient_rank), Int(0));
        for (const GeometricCrossing& c : crossings)
            sum = ivec_add(sum, ivec_scale(c.co_normal, weights[c.index]));
        if (!is_zero(sum)) {
            rep.balanced = false;
            rep.violations.push_back(omega);
        }
    }
    return rep;
}

ScatteringDiagram widget(const TropicalHypersurface& t, const LatticeMap& quotient_map,
                         const IVec& v, const TruncatedSeries& f,
                         const std::vector<std::optional<RationalCone>>& fan_lift) {
    int ambient = quotient_map.source_rank();
    if (quotient_map.target_rank() != t.quotient_rank)
        throw DimensionError("widget: quotient map target rank mismatch");
    if (!f.is_one_mod_mq()) throw DomainError("widget: f must be 1 mod m_Q");
    if (!is_zero(quotient_map.apply(v)))
        throw DomainError("widget: v must generate the quotiented ray");
    IVec v0 = primitive(v);
    for (const auto& [k, c] : f.terms()) {
        if (is_zero(k.m_exp)) continue;
        std::optional<IVec> coord = in_span_coordinates({v0}, k.m_exp);
        if (!coord || (*coord)[0] < 1) throw DomainError("widget: f must lie in k[z^v][[Q]]");
    }

    ScatteringDiagram d;
    d.ambient_rank = ambient;
    d.context = f.context();
    d.order = f.order();
    for (size_t i = 0; i < t.cones.size(); ++i) {
        if (t.weights[i] == 0) continue;
        if (t.weights[i] < 0) throw DomainError("widget: negative weight");
        RationalCone lift;
        if (i < fan_lift.size() && fan_lift[i]) {
            lift = cone_canonicalize(*fan_lift[i]);
        } else {
            // full preimage of the quotient cone
            RationalCone sigma = cone_canonicalize(t.cones[i]);
            std::vector<IVec> eqs, ineqs;
            for (const IVec& e : sigma.eqs) {
                IVec pb(static_cast<size_t>(ambient));
                for (int j = 0; j < ambient; ++j) pb[j] = pairing(e, quotient_map.m.col(j));
                eqs.push_back(pb);
            }
            for (const IVec& b : sigma.ineqs) {
                IVec pb(static_cast<size_t>(ambient));
                for (int j = 0; j < ambient; ++j) pb[j] = pairing(b, quotient_map.m.col(j));
                ineqs.push_back(pb);
            }
            lift = cone_canonicalize(RationalCone::from_constraints(ambient, eqs, ineqs));
        }
        if (cone_dim(lift) != ambient - 1) throw DomainError("widget: lift not of codimension one");
        if (!cone_contains(lift, v0)) throw DomainError("widget: lift does not contain the ray of v");
        long w = static_cast<long>(t.weights[i]);
        Wall wall = make_wall(lift, int_pow(f, w));
        if (classify(wall) != WallType::Incoming) throw DomainError("widget: wall not incoming");
        d.walls.push_back(std::move(wall));
    }
    return d;
}

std::vector<Wall> local_defect_factorization(const ScatteringDiagram& d,
                                             const AutomorphismDescriptor& defect,
                                             const RationalCone& jt, int order_j) {
    int rank = d.ambient_rank;
    const MonoidContext& ctx = d.context;

    // eps_i = P(z^{e_i}) z^{-e_i} - 1, required to vanish below order_j
    std::vector<TruncatedSeries> eps;
    for (int i = 0; i < rank; ++i) {
        IVec e = basis_vector(rank, i);
        TruncatedSeries img = defect.apply_to_monomial(e);
        TruncatedSeries u = mul(img, TruncatedSeries::monomial(ctx, rank, defect.order, Rat(1),
                                                               ivec_neg(e),
                                                               QExp(static_cast<size_t>(ctx.q_rank), 0)));
        TruncatedSeries e_i = u - TruncatedSeries::one(ctx, rank, defect.order);
        for (const auto& [k, c] : e_i.terms())
            if (ctx.q_degree(k.q_exp) < order_j)
                throw DomainError("local_defect_factorization: defect not identity below current order");
        eps.push_back(std::move(e_i));
    }

    // collect the log-defect functionals per monomial (d_exp, beta):
    // eps_i coefficient = <nu_{d,beta}, e_i>
    struct MonKey {
        IVec d_exp;
        QExp beta;
        bool operator<(const MonKey& o) const {
            if (beta != o.beta) return beta < o.beta;
            return ivec_cmp(d_exp, o.d_exp) < 0;
        }
    };
    std::map<MonKey, QVec> nu;
    for (int i = 0; i < rank; ++i)
        for (const auto& [k, c] : eps[i].terms()) {
            if (ctx.q_degree(k.q_exp) != order_j) continue;
            MonKey key{k.m_exp, k.q_exp};
            auto it = nu.find(key);
            if (it == nu.end())
                it = nu.emplace(key, QVec(static_cast<size_t>(rank), Rat(0))).first;
            it->second[i] = c;
        }
    if (nu.empty()) return {};

    // group by primitive direction
    std::map<std::string, IVec> directions;
    for (const auto& [key, val] : nu) {
        if (is_zero(key.d_exp))
            throw DomainError("local_defect_factorization: defect monomial with no lattice part");
        IVec d0 = primitive(key.d_exp);
        directions.emplace(ivec_str(d0), d0);
    }

    LoopSpec loop = make_joint_loop(d, jt);
    std::vector<Wall> corrections;
    for (const auto& [dkey, d0] : directions) {
        RationalCone support = cone_ray_sum(jt, ivec_neg(d0));
        if (cone_dim(support) != rank - 1)
            throw DomainError("local_defect_factorization: defect direction tangent to the joint span");
        RationalCone canon = cone_canonicalize(support);
        if (canon.eqs.size() != 1)
            throw DomainError("local_defect_factorization: correction support not codimension one");
        IVec n0 = sign_canonical(canon.eqs[0]);

        // trace ray of the new wall in the loop plane and the matching
        // approach co-normal
        Int nu_u = pairing(n0, loop.u);
        Int nw_w = pairing(n0, loop.w);
        if (nu_u == 0 && nw_w == 0)
            throw NonTransversalPathError("correction wall span contains the loop plane");
        std::pair<Int, Int> rho{-nw_w, nu_u};
        {
            Int g = boost::multiprecision::gcd(rho.first, rho.second);
            rho.first /= g;
            rho.second /= g;
        }
        bool found_side = false;
        std::pair<Int, Int> ray = rho;
        for (int sgn = 0; sgn < 2; ++sgn) {
            std::pair<Int, Int> r2 = sgn == 0 ? rho : std::pair<Int, Int>{-rho.first, -rho.second};
            IVec v_amb = ivec_add(ivec_scale(loop.u, r2.first), ivec_scale(loop.w, r2.second));
            bool ok = true;
            for (const IVec& a : canon.ineqs) {
                if (pairing_q(a, loop.base) != 0) continue;
                if (pairing(a, v_amb) <= 0) ok = false;
            }
            if (ok) {
                ray = r2;
                found_side = true;
                break;
            }
        }
        if (!found_side)
            throw DomainError("local_defect_factorization: no loop-transversal side for correction");
        // co-normal negative on the approach side (counterclockwise)
        std::pair<Int, Int> tau{-ray.second, ray.first};
        Int val = nu_u * tau.first + nw_w * tau.second;
        IVec n_gamma = val > 0 ? n0 : ivec_neg(n0);

        // log f = -sum r_{d,beta} t^beta z^d over the group
        TruncatedSeries logf = TruncatedSeries::zero(ctx, rank, d.order);
        for (const auto& [key, nuvec] : nu) {
            if (ivec_cmp(primitive(key.d_exp), d0) != 0) continue;
            // nuvec must be proportional to n_gamma
            Rat r(0);
            for (int i = 0; i < rank; ++i)
                if (n_gamma[i] != 0) {
                    r = nuvec[i] / Rat(n_gamma[i]);
                    break;
                }
            for (int i = 0; i < rank; ++i)
                if (nuvec[i] != r * Rat(n_gamma[i]))
                    throw DomainError(
                        "local_defect_factorization: defect functional not aligned with a wall normal");
            if (pairing_q(key.d_exp, nuvec) != 0)
                throw DomainError("local_defect_factorization: defect derivation not tangent");
            logf.add_term(-r, key.d_exp, key.beta);
        }
        if (logf.is_zero()) continue;
        TruncatedSeries f = exp_log(logf, ExpLogMode::Exp);
        Wall wall = make_wall(canon, f);
        if (classify(wall) != WallType::Outgoing)
            throw DomainError("local_defect_factorization: correction wall not outgoing");
        corrections.push_back(std::move(wall));
    }
    return corrections;
}

namespace {

bool is_full_hyperplane(const RationalCone& c) {
    return cone_dim(c) == c.ambient_rank - 1 &&
           static_cast<int>(cone_lineality(c).size()) == c.ambient_rank - 1;
}

std::string wall_slot_key(const Wall& w) {
    return cone_key(w.support) + "#" + ivec_str(w.direction);
}

}  // namespace

CompletionReport complete(const ScatteringDiagram& d_in, int target_order,
                          const CompletionOptions& opts) {
    validate_diagram(d_in);
    CompletionReport report;
    report.input = d_in;

    ScatteringDiagram cur = normalize(truncate_diagram(d_in, target_order));
    cur.order = target_order;

    bool all_hyperplane_incoming = true;
    for (const Wall& w : cur.walls)
        if (!is_full_hyperplane(w.support) || classify(w) != WallType::Incoming)
            all_hyperplane_incoming = false;
    if (!all_hyperplane_incoming) {
        ScatteringDiagram probe = truncate_diagram(cur, 1);
        if (!is_consistent(probe).consistent)
            throw CompletionPreconditionError(
                "complete: initial walls must be incoming hyperplanes through 0, or consistent at order 1");
    }
    // coplanar overlapping initial walls with distinct directions
    for (size_t i = 0; i < cur.walls.size(); ++i)
        for (size_t j = i + 1; j < cur.walls.size(); ++j) {
            if (ivec_cmp(cur.walls[i].normal, cur.walls[j].normal) != 0) continue;
            RationalCone meet = cone_intersect(cur.walls[i].support, cur.walls[j].support);
            if (cone_dim(meet) == cur.ambient_rank - 1 && !opts.perturb)
                throw CompletionPreconditionError(
                    "complete: coplanar initial walls overlap in codimension < 2 (rerun with the "
                    "perturbation flag to proceed with merged crossings)");
        }

    auto defect_min_degree = [&](const AutomorphismDescriptor& p) {
        int min_deg = target_order + 1;
        for (int i = 0; i < cur.ambient_rank; ++i) {
            IVec e(static_cast<size_t>(cur.ambient_rank), Int(0));
            e[i] = 1;
            TruncatedSeries img = p.apply_to_monomial(e);
            TruncatedSeries u = mul(img, TruncatedSeries::monomial(
                                             cur.context, cur.ambient_rank, cur.order, Rat(1),
                                             ivec_neg(e),
                                             QExp(static_cast<size_t>(cur.context.q_rank), 0)));
            TruncatedSeries eps = u - TruncatedSeries::one(cur.context, cur.ambient_rank, cur.order);
            min_deg = std::min(min_deg, eps.min_q_degree());
        }
        return min_deg;
    };

    for (int sweep = 0;; ++sweep) {
        if (sweep > 64 * (target_order + 1))
            throw DomainError("complete: correction sweeps did not stabilize");
        std::vector<RationalCone> joints = enumerate_joints(cur);
        int global_min = target_order + 1;
        for (const RationalCone& jt : joints) {
            LoopSpec loop = make_joint_loop(cur, jt);
            global_min = std::min(global_min, defect_min_degree(path_ordered_product(cur, loop)));
        }
        if (global_min > target_order) break;
        // cancel every defect at the current minimal order before moving on
        for (const RationalCone& jt : joints) {
            LoopSpec loop = make_joint_loop(cur, jt);
            AutomorphismDescriptor p = path_ordered_product(cur, loop);
            if (defect_min_degree(p) != global_min) continue;
            std::vector<Wall> corrections = local_defect_factorization(cur, p, jt, global_min);
            if (corrections.empty())
                throw DomainError("complete: nonzero defect produced no corrections");
            for (Wall& c : corrections) {
                std::string slot = wall_slot_key(c);
                bool merged = false;
                for (Wall& w : cur.walls)
                    if (wall_slot_key(w) == slot) {
                        TruncatedSeries nf = mul(*w.function, *c.function);
                        // a correction augments higher orders; cancelling the
                        // established leading term means no valid completion
                        // with only-outgoing insertions exists for this input
                        TruncatedSeries old_tail =
                            *w.function - TruncatedSeries::one(cur.context, cur.ambient_rank, cur.order);
                        TruncatedSeries new_tail =
                            nf - TruncatedSeries::one(cur.context, cur.ambient_rank, cur.order);
                        if (new_tail.min_q_degree() > old_tail.min_q_degree())
                            throw CompletionPreconditionError(
                                "complete: input wall cancelled by its own correction; no "
                                "outgoing-only completion exists");
                        w.function = std::make_shared<const TruncatedSeries>(std::move(nf));
                        merged = true;
                        break;
                    }
                if (!merged) cur.walls.push_back(c);
                report.added.push_back(AddedWall{global_min, jt, c});
            }
        }
    }
    report.output = normalize(cur);
    return report;
}

}  // namespace scatter
