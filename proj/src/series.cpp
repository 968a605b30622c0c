#include "scatter/series.hpp"

#include <sstream>

namespace scatter {

void TruncatedSeries::add_term(const Rat& c, const IVec& m, const QExp& q) {
    if (c == 0) return;
    if (static_cast<int>(m.size()) != lattice_rank_ || static_cast<int>(q.size()) != ctx_.q_rank)
        throw DimensionError("TruncatedSeries::add_term: exponent size mismatch");
    if (ctx_.q_degree(q) > order_) return;
    TermKey key{m, q};
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(std::move(key), c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Rat TruncatedSeries::coeff(const IVec& m, const QExp& q) const {
    auto it = terms_.find(TermKey{m, q});
    return it == terms_.end() ? Rat(0) : it->second;
}

bool TruncatedSeries::is_one() const {
    if (terms_.size() != 1) return false;
    const auto& [k, c] = *terms_.begin();
    return c == 1 && scatter::is_zero(k.m_exp) && ctx_.q_degree(k.q_exp) == 0;
}

bool TruncatedSeries::is_one_mod_mq() const {
    bool saw_unit = false;
    for (const auto& [k, c] : terms_) {
        if (ctx_.q_degree(k.q_exp) == 0) {
            if (!scatter::is_zero(k.m_exp) || c != 1) return false;
            saw_unit = true;
        }
    }
    return saw_unit;
}

bool TruncatedSeries::is_zero_mod_mq() const {
    for (const auto& [k, c] : terms_)
        if (ctx_.q_degree(k.q_exp) == 0) return false;
    return true;
}

int TruncatedSeries::min_q_degree() const {
    int best = order_ + 1;
    for (const auto& [k, c] : terms_) best = std::min(best, ctx_.q_degree(k.q_exp));
    return best;
}

TruncatedSeries TruncatedSeries::truncated(int new_order) const {
    TruncatedSeries r(ctx_, lattice_rank_, new_order);
    for (const auto& [k, c] : terms_) r.add_term(c, k.m_exp, k.q_exp);
    return r;
}

void TruncatedSeries::check_compatible(const TruncatedSeries& o) const {
    if (ctx_ != o.ctx_) throw DomainError("TruncatedSeries: monoid context mismatch");
    if (lattice_rank_ != o.lattice_rank_) throw DimensionError("TruncatedSeries: lattice rank mismatch");
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& o) const {
    check_compatible(o);
    TruncatedSeries r(ctx_, lattice_rank_, std::min(order_, o.order_));
    for (const auto& [k, c] : terms_) r.add_term(c, k.m_exp, k.q_exp);
    for (const auto& [k, c] : o.terms_) r.add_term(c, k.m_exp, k.q_exp);
    return r;
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& o) const {
    check_compatible(o);
    TruncatedSeries r(ctx_, lattice_rank_, std::min(order_, o.order_));
    for (const auto& [k, c] : terms_) r.add_term(c, k.m_exp, k.q_exp);
    for (const auto& [k, c] : o.terms_) r.add_term(-c, k.m_exp, k.q_exp);
    return r;
}

TruncatedSeries TruncatedSeries::scaled(const Rat& c) const {
    TruncatedSeries r(ctx_, lattice_rank_, order_);
    if (c == 0) return r;
    for (const auto& [k, v] : terms_) r.add_term(v * c, k.m_exp, k.q_exp);
    return r;
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& o) const { return mul(*this, o); }

bool TruncatedSeries::operator==(const TruncatedSeries& o) const {
    return ctx_ == o.ctx_ && lattice_rank_ == o.lattice_rank_ && order_ == o.order_ &&
           terms_ == o.terms_;
}

uint64_t TruncatedSeries::fingerprint() const {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t x) {
        h ^= x;
        h *= 1099511628211ull;
    };
    mix(static_cast<uint64_t>(order_));
    mix(static_cast<uint64_t>(lattice_rank_));
    for (const auto& [k, c] : terms_) {
        for (const Int& x : k.m_exp) mix(std::hash<std::string>{}(x.str()));
        for (int64_t q : k.q_exp) mix(static_cast<uint64_t>(q) * 2654435761ull + 17);
        mix(std::hash<std::string>{}(numerator(c).str()));
        mix(std::hash<std::string>{}(denominator(c).str()));
    }
    return h;
}

TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.context() != b.context()) throw DomainError("mul: monoid context mismatch");
    if (a.lattice_rank() != b.lattice_rank()) throw DimensionError("mul: lattice rank mismatch");
    int order = std::min(a.order(), b.order());
    TruncatedSeries r(a.context(), a.lattice_rank(), order);
    const auto& actx = a.context();
    for (const auto& [ka, ca] : a.terms()) {
        int da = actx.q_degree(ka.q_exp);
        if (da > order) continue;
        for (const auto& [kb, cb] : b.terms()) {
            if (da + actx.q_degree(kb.q_exp) > order) continue;
            IVec m = ivec_add(ka.m_exp, kb.m_exp);
            QExp q(ka.q_exp.size());
            for (size_t i = 0; i < q.size(); ++i) q[i] = ka.q_exp[i] + kb.q_exp[i];
            r.add_term(ca * cb, m, q);
        }
    }
    return r;
}

TruncatedSeries int_pow(const TruncatedSeries& f, long e) {
    const MonoidContext& ctx = f.context();
    int order = f.order();
    if (e == 0) return TruncatedSeries::one(ctx, f.lattice_rank(), order);
    TruncatedSeries base = f;
    if (e < 0) {
        IVec zero_m(static_cast<size_t>(f.lattice_rank()), Int(0));
        QExp zero_q(static_cast<size_t>(ctx.q_rank), 0);
        if (f.coeff(zero_m, zero_q) != 1 || !f.is_one_mod_mq())
            throw DomainError("int_pow: negative power of a non-unit leading term");
        // geometric-series inversion of 1 + g with g in m_Q
        TruncatedSeries g = f - TruncatedSeries::one(ctx, f.lattice_rank(), order);
        TruncatedSeries inv = TruncatedSeries::one(ctx, f.lattice_rank(), order);
        TruncatedSeries pow = TruncatedSeries::one(ctx, f.lattice_rank(), order);
        for (int j = 1; j <= order; ++j) {
            pow = mul(pow, g);
            if (pow.is_zero()) break;
            inv = (j % 2 == 1) ? inv - pow : inv + pow;
        }
        base = inv;
        e = -e;
    }
    TruncatedSeries acc = TruncatedSeries::one(ctx, f.lattice_rank(), order);
    unsigned long n = static_cast<unsigned long>(e);
    while (n > 0) {
        if (n & 1ul) acc = mul(acc, base);
        n >>= 1;
        if (n) base = mul(base, base);
    }
    return acc;
}

TruncatedSeries exp_log(const TruncatedSeries& f, ExpLogMode mode) {
    const MonoidContext& ctx = f.context();
    int order = f.order();
    if (mode == ExpLogMode::Exp) {
        if (!f.is_zero_mod_mq()) throw DomainError("exp: argument must vanish mod m_Q");
        TruncatedSeries acc = TruncatedSeries::one(ctx, f.lattice_rank(), order);
        TruncatedSeries pow = TruncatedSeries::one(ctx, f.lattice_rank(), order);
        Rat fact(1);
        for (int j = 1; j <= order; ++j) {
            pow = mul(pow, f);
            if (pow.is_zero()) break;
            fact *= j;
            acc = acc + pow.scaled(Rat(1) / fact);
        }
        return acc;
    }
    if (!f.is_one_mod_mq()) throw DomainError("log: argument must be 1 mod m_Q");
    TruncatedSeries g = f - TruncatedSeries::one(ctx, f.lattice_rank(), order);
    TruncatedSeries acc = TruncatedSeries::zero(ctx, f.lattice_rank(), order);
    TruncatedSeries pow = TruncatedSeries::one(ctx, f.lattice_rank(), order);
    for (int j = 1; j <= order; ++j) {
        pow = mul(pow, g);
        if (pow.is_zero()) break;
        Rat c = Rat(1) / j;
        acc = (j % 2 == 1) ? acc + pow.scaled(c) : acc - pow.scaled(c);
    }
    return acc;
}

TruncatedSeries remap_exponents(const TruncatedSeries& f, const LatticeMap& lattice_map,
                                const MonoidContext& target_ctx,
                                const std::function<QExp(const QExp&)>& q_map) {
    if (lattice_map.source_rank() != f.lattice_rank())
        throw DimensionError("remap_exponents: lattice map source rank mismatch");
    TruncatedSeries r(target_ctx, lattice_map.target_rank(), f.order());
    for (const auto& [k, c] : f.terms()) {
        QExp q = q_map(k.q_exp);
        if (static_cast<int>(q.size()) != target_ctx.q_rank)
            throw DimensionError("remap_exponents: q_map target size mismatch");
        r.add_term(c, lattice_map.apply(k.m_exp), q);
    }
    return r;
}

std::string series_str(const TruncatedSeries& f) {
    if (f.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : f.terms()) {
        if (!first) os << " + ";
        first = false;
        os << c;
        for (int i = 0; i < f.context().q_rank; ++i)
            if (k.q_exp[i] != 0) {
                os << "*" << f.context().generator_names[i];
                if (k.q_exp[i] != 1) os << "^" << k.q_exp[i];
            }
        if (!is_zero(k.m_exp)) os << "*z^" << ivec_str(k.m_exp);
    }
    return os.str();
}

}  // namespace scatter
