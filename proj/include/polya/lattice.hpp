#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "polya/common.hpp"

namespace polya {

// A point of Z^d. Exact integer coordinates; d >= 1.
using Coord = std::int64_t;
using LatticeVector = std::vector<Coord>;

// Entries are +1 or -1; zero coordinates carry +1 (the 0/0 = 1 convention).
using SignVector = std::vector<int>;

inline std::string to_string(const LatticeVector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s + ")";
}

// l1-norm.
inline Coord norm(const LatticeVector& v) {
    Coord s = 0;
    for (Coord c : v) s += c < 0 ? -c : c;
    return s;
}

inline bool is_zero(const LatticeVector& v) {
    for (Coord c : v) if (c != 0) return false;
    return true;
}

// (module, sign vector); recomposes exactly because zero coordinates are
// sign-insensitive.
inline std::pair<LatticeVector, SignVector> decompose(const LatticeVector& v) {
    LatticeVector abs(v.size());
    SignVector sgn(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        abs[i] = v[i] < 0 ? -v[i] : v[i];
        sgn[i] = v[i] < 0 ? -1 : +1;
    }
    return {std::move(abs), std::move(sgn)};
}

inline LatticeVector compose(const LatticeVector& abs, const SignVector& sgn) {
    LatticeVector v(abs.size());
    for (std::size_t i = 0; i < abs.size(); ++i) v[i] = sgn[i] < 0 ? -abs[i] : abs[i];
    return v;
}

inline LatticeVector abs_of(const LatticeVector& v) {
    LatticeVector a(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) a[i] = v[i] < 0 ? -v[i] : v[i];
    return a;
}

// (d0, d1): number of zero coordinates and of coordinates with |c| = 1.
inline std::pair<int, int> count_profile(const LatticeVector& v) {
    int d0 = 0, d1 = 0;
    for (Coord c : v) {
        if (c == 0) ++d0;
        else if (c == 1 || c == -1) ++d1;
    }
    return {d0, d1};
}

// Neighbors one norm step below: one per nonzero coordinate, signs inherited.
// Listed in coordinate order.
inline std::vector<LatticeVector> lower_set(const LatticeVector& v) {
    if (is_zero(v)) throw ZeroVectorError("lower_set: zero vector has no lower set");
    std::vector<LatticeVector> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0) continue;
        LatticeVector m = v;
        m[i] += v[i] > 0 ? -1 : +1;
        out.push_back(std::move(m));
    }
    return out;
}

// Neighbors one norm step above: nonzero coordinates move outward, zero
// coordinates contribute both sign branches (+ before -). Defined for v = 0,
// where it yields the 2d unit vectors.
inline std::vector<LatticeVector> upper_set(const LatticeVector& v) {
    std::vector<LatticeVector> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0) {
            LatticeVector m = v;
            m[i] += v[i] > 0 ? +1 : -1;
            out.push_back(std::move(m));
        } else {
            LatticeVector p = v, q = v;
            p[i] = +1;
            q[i] = -1;
            out.push_back(std::move(p));
            out.push_back(std::move(q));
        }
    }
    return out;
}

// Moduli of the upper set with multiplicities: exactly d entries, one per
// coordinate; a zero coordinate folds its two sign branches into range 2.
inline std::vector<std::pair<LatticeVector, int>> abs_upper_set(const LatticeVector& v) {
    if (is_zero(v)) throw ZeroVectorError("abs_upper_set: zero vector");
    std::vector<std::pair<LatticeVector, int>> out;
    out.reserve(v.size());
    LatticeVector a = abs_of(v);
    for (std::size_t i = 0; i < v.size(); ++i) {
        LatticeVector m = a;
        m[i] += 1;
        out.emplace_back(std::move(m), v[i] == 0 ? 2 : 1);
    }
    return out;
}

// All vectors sharing the modulus |v|: 2^(d-d0) sign patterns over the nonzero
// coordinates, enumerated little-endian (first nonzero coordinate flips fastest).
inline std::vector<LatticeVector> x_class(const LatticeVector& v) {
    std::vector<std::size_t> nz;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) nz.push_back(i);
    LatticeVector a = abs_of(v);
    std::vector<LatticeVector> out;
    out.reserve(std::size_t(1) << nz.size());
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << nz.size()); ++mask) {
        LatticeVector m = a;
        for (std::size_t b = 0; b < nz.size(); ++b)
            if (mask >> b & 1) m[nz[b]] = -m[nz[b]];
        out.push_back(std::move(m));
    }
    return out;
}

namespace detail {
inline void shell_rec(int d, Coord rem, std::size_t i, LatticeVector& cur, bool nonneg,
                      std::vector<LatticeVector>& out) {
    if (i + 1 == cur.size()) {
        cur[i] = rem;
        out.push_back(cur);
        if (!nonneg && rem != 0) {
            cur[i] = -rem;
            out.push_back(cur);
        }
        cur[i] = 0;
        return;
    }
    for (Coord a = 0; a <= rem; ++a) {
        cur[i] = a;
        shell_rec(d, rem - a, i + 1, cur, nonneg, out);
        if (!nonneg && a != 0) {
            cur[i] = -a;
            shell_rec(d, rem - a, i + 1, cur, nonneg, out);
        }
        cur[i] = 0;
    }
}
}  // namespace detail

// All vectors of norm n, by composition of the norm into signed parts;
// deterministic order (absolute parts ascending per coordinate, + before -).
inline std::vector<LatticeVector> enumerate_shell(int d, Coord n, bool nonneg = false) {
    if (d < 1) throw DomainError("enumerate_shell: d must be >= 1");
    if (n < 0) throw DomainError("enumerate_shell: n must be >= 0");
    std::vector<LatticeVector> out;
    LatticeVector cur(d, 0);
    detail::shell_rec(d, n, 0, cur, nonneg, out);
    return out;
}

}  // namespace polya
