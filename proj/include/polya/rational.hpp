#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace polya {

// Exact arithmetic for all combinatorial identities. Floating point is
// reserved for pmfs and statistics.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_string(const Rational& r) { return r.str(); }

// binom(n, k) with binom(0,0) = 1 and 0 whenever n < k or an index is negative.
inline BigInt binomial(long long n, long long k) {
    if (k < 0 || n < 0 || n < k) return 0;
    if (k == 0 || k == n) return 1;
    if (k > n - k) k = n - k;
    BigInt acc = 1;
    for (long long i = 1; i <= k; ++i) {
        acc *= (n - k + i);
        acc /= i;
    }
    return acc;
}

}  // namespace polya
