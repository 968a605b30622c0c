#pragma once

#include "scatter/lattice.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace scatter {

// Free grading monoid Q = N^q_rank with positive integer degree weights.
// Q^x = {0} holds by construction.
struct MonoidContext {
    int q_rank = 0;
    std::vector<std::string> generator_names;
    std::vector<int> q_degree_weights;

    static MonoidContext free_monoid(std::vector<std::string> names) {
        MonoidContext c;
        c.q_rank = static_cast<int>(names.size());
        c.generator_names = std::move(names);
        c.q_degree_weights.assign(c.q_rank, 1);
        return c;
    }
    int q_degree(const std::vector<int64_t>& beta) const {
        int d = 0;
        for (int i = 0; i < q_rank; ++i) d += q_degree_weights[i] * static_cast<int>(beta[i]);
        return d;
    }
    bool operator==(const MonoidContext& o) const {
        return q_rank == o.q_rank && generator_names == o.generator_names &&
               q_degree_weights == o.q_degree_weights;
    }
    bool operator!=(const MonoidContext& o) const { return !(*this == o); }
};

using QExp = std::vector<int64_t>;

// Key ordering: lexicographic on q_exp, then on m_exp.
struct TermKey {
    IVec m_exp;
    QExp q_exp;
    bool operator<(const TermKey& o) const {
        if (q_exp != o.q_exp) return q_exp < o.q_exp;
        return ivec_cmp(m_exp, o.m_exp) < 0;
    }
    bool operator==(const TermKey& o) const {
        return q_exp == o.q_exp && ivec_cmp(m_exp, o.m_exp) == 0;
    }
};

struct Term {
    Rat coeff;
    IVec m_exp;
    QExp q_exp;
};

// Element of k[M'][Q] / m_Q^{order+1} with exact rational coefficients.
// Monomials are c * t^q_exp * z^m_exp; only terms with q-degree <= order are
// stored and a zero coefficient is never stored.
class TruncatedSeries {
  public:
    TruncatedSeries() = default;
    TruncatedSeries(MonoidContext ctx, int lattice_rank, int order)
        : ctx_(std::move(ctx)), lattice_rank_(lattice_rank), order_(order) {}

    static TruncatedSeries one(const MonoidContext& ctx, int lattice_rank, int order) {
        TruncatedSeries s(ctx, lattice_rank, order);
        s.add_term(Rat(1), IVec(static_cast<size_t>(lattice_rank), Int(0)),
                   QExp(static_cast<size_t>(ctx.q_rank), 0));
        return s;
    }
    static TruncatedSeries zero(const MonoidContext& ctx, int lattice_rank, int order) {
        return TruncatedSeries(ctx, lattice_rank, order);
    }
    static TruncatedSeries monomial(const MonoidContext& ctx, int lattice_rank, int order,
                                    const Rat& c, const IVec& m, const QExp& q) {
        TruncatedSeries s(ctx, lattice_rank, order);
        s.add_term(c, m, q);
        return s;
    }

    const MonoidContext& context() const { return ctx_; }
    int lattice_rank() const { return lattice_rank_; }
    int order() const { return order_; }
    const std::map<TermKey, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }

    void add_term(const Rat& c, const IVec& m, const QExp& q);
    Rat coeff(const IVec& m, const QExp& q) const;

    bool is_one() const;
    // f == 1 mod m_Q: constant term 1, all other terms of positive q-degree.
    bool is_one_mod_mq() const;
    // f == 0 mod m_Q
    bool is_zero_mod_mq() const;
    // lowest q-degree of a nonzero term; order+1 when zero.
    int min_q_degree() const;

    TruncatedSeries truncated(int new_order) const;
    TruncatedSeries operator+(const TruncatedSeries& o) const;
    TruncatedSeries operator-(const TruncatedSeries& o) const;
    TruncatedSeries operator*(const TruncatedSeries& o) const;
    TruncatedSeries scaled(const Rat& c) const;
    bool operator==(const TruncatedSeries& o) const;

    uint64_t fingerprint() const;

  private:
    MonoidContext ctx_;
    int lattice_rank_ = 0;
    int order_ = 0;
    std::map<TermKey, Rat> terms_;

    void check_compatible(const TruncatedSeries& o) const;
};

TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b);
// f^e; e < 0 requires leading constant term 1 (inverts the m_Q-positive tail).
TruncatedSeries int_pow(const TruncatedSeries& f, long e);
enum class ExpLogMode { Exp, Log };
TruncatedSeries exp_log(const TruncatedSeries& f, ExpLogMode mode);

// Applies (m, beta) -> (lattice_map(m), q_map(beta)) termwise, merging
// collisions and re-truncating in the target context.
TruncatedSeries remap_exponents(const TruncatedSeries& f, const LatticeMap& lattice_map,
                                const MonoidContext& target_ctx,
                                const std::function<QExp(const QExp&)>& q_map);

std::string series_str(const TruncatedSeries& f);

}  // namespace scatter
