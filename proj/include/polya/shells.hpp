#pragma once

#include "polya/common.hpp"
#include "polya/lattice.hpp"
#include "polya/rational.hpp"

namespace polya {

// Whole-shell transition combinatorics at norm level n:
//   c  = total count of nonzero coordinates over the shell,
//   c0 = twice the count of zero coordinates over the shell,
//   p_up = (c0 + c) / (c0 + 2c), the norm-process up probability.
struct ShellCombinatorics {
    int d = 0;
    Coord n = 0;
    BigInt c, c0;
    Rational p_up;
};

inline BigInt shell_c(int d, Coord n) {
    BigInt s = 0;
    for (int i = 1; i <= d; ++i)
        s += BigInt(i) * (BigInt(1) << i) * binomial(d, i) * binomial(n - 1, i - 1);
    return s;
}

inline BigInt shell_c0(int d, Coord n) {
    BigInt s = 0;
    for (int i = 1; i <= d - 1; ++i)
        s += BigInt(d - i) * (BigInt(1) << (i + 1)) * binomial(d, i) * binomial(n - 1, i - 1);
    return s;
}

inline ShellCombinatorics shell_combinatorics(int d, Coord n) {
    if (d < 1) throw DomainError("shell_combinatorics: d must be >= 1");
    if (n < 1) throw DomainError("shell_combinatorics: n must be >= 1");
    ShellCombinatorics sc;
    sc.d = d;
    sc.n = n;
    sc.c = shell_c(d, n);
    sc.c0 = shell_c0(d, n);
    sc.p_up = Rational(sc.c0 + sc.c, sc.c0 + 2 * sc.c);
    return sc;
}

// Number of vectors of norm n in Z^d (or its nonnegative orthant); n = 0 -> 1.
inline BigInt shell_size(int d, Coord n, bool nonneg = false) {
    if (d < 1) throw DomainError("shell_size: d must be >= 1");
    if (n < 0) throw DomainError("shell_size: n must be >= 0");
    if (n == 0) return 1;
    BigInt s = 0;
    for (int i = 1; i <= d; ++i) {
        BigInt term = binomial(d, i) * binomial(n - 1, i - 1);
        if (!nonneg) term <<= i;
        s += term;
    }
    return s;
}

// Stationary probability of the capacity-N reflected chain at state v:
// product form 2^(d-d0(v)) / (2N+1)^d.
inline Rational box_stationary(Coord N, const LatticeVector& v) {
    if (N < 1) throw DomainError("box_stationary: N must be >= 1");
    for (Coord c : v)
        if (c < 0 || c > N)
            throw DomainError("box_stationary: coordinate outside [0,N]: " + to_string(v));
    int d = static_cast<int>(v.size());
    int d0 = count_profile(v).first;
    BigInt denom = 1;
    for (int i = 0; i < d; ++i) denom *= (2 * N + 1);
    return Rational(BigInt(1) << (d - d0), denom);
}

}  // namespace polya
