#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scatter {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

using IVec = std::vector<Int>;
using QVec = std::vector<Rat>;

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Int ivec_gcd(const IVec& v) {
    Int g = 0;
    for (const Int& x : v) g = boost::multiprecision::gcd(g, x);
    return g;
}

inline bool is_zero(const IVec& v) {
    for (const Int& x : v)
        if (x != 0) return false;
    return true;
}

inline IVec ivec_add(const IVec& a, const IVec& b) {
    if (a.size() != b.size()) throw DimensionError("vector size mismatch");
    IVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline IVec ivec_sub(const IVec& a, const IVec& b) {
    if (a.size() != b.size()) throw DimensionError("vector size mismatch");
    IVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline IVec ivec_neg(const IVec& a) {
    IVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

inline IVec ivec_scale(const IVec& a, const Int& c) {
    IVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
    return r;
}

// Exact duality pairing <n, m>; both sides must have equal rank.
inline Int pairing(const IVec& n, const IVec& m) {
    if (n.size() != m.size()) throw DimensionError("pairing: rank mismatch");
    Int s = 0;
    for (size_t i = 0; i < n.size(); ++i) s += n[i] * m[i];
    return s;
}

inline Rat pairing_q(const IVec& n, const QVec& x) {
    if (n.size() != x.size()) throw DimensionError("pairing: rank mismatch");
    Rat s = 0;
    for (size_t i = 0; i < n.size(); ++i) s += Rat(n[i]) * x[i];
    return s;
}

// v = g * primitive(v), g = gcd of coordinates. Errors on v = 0.
inline std::pair<IVec, Int> primitive_part(const IVec& v) {
    Int g = ivec_gcd(v);
    if (g == 0) throw DomainError("primitive_part: zero vector");
    IVec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = v[i] / g;
    return {r, g};
}

inline IVec primitive(const IVec& v) { return primitive_part(v).first; }

// Clears denominators and divides by the gcd; canonical integer ray of a
// nonzero rational direction.
inline IVec primitive_of_rational(const QVec& v) {
    Int lcm = 1;
    for (const Rat& x : v) lcm = boost::multiprecision::lcm(lcm, denominator(x));
    IVec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = numerator(v[i]) * (lcm / denominator(v[i]));
    return primitive(r);
}

// Sign-canonical representative of {v, -v}: first nonzero coordinate > 0.
inline IVec sign_canonical(const IVec& v) {
    for (const Int& x : v) {
        if (x > 0) return v;
        if (x < 0) return ivec_neg(v);
    }
    return v;
}

inline int ivec_cmp(const IVec& a, const IVec& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return -1;
        if (a[i] > b[i]) return 1;
    }
    return 0;
}

inline std::string ivec_str(const IVec& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += v[i].str();
    }
    return s + ")";
}

// splitmix64; deterministic stream for generic-point selection and tests.
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // uniform in [lo, hi]
    int64_t range(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(next() % static_cast<uint64_t>(hi - lo + 1));
    }
};

}  // namespace scatter
