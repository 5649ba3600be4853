#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <vector>

#include "polya/common.hpp"
#include "polya/rational.hpp"

namespace polya {

// Exact sub-probability masses of the one-dimensional crossing counts,
// accumulated over all first-return paths of length <= L. Masses are exact
// dyadic rationals (units of 2^-L) and converge to the analytic values from
// below as L grows.
struct D1OracleResult {
    int L = 0;
    Rational total_returned{0};
    // level in {+-1,+-2,+-3} -> masses indexed by count k
    std::map<Coord, std::vector<Rational>> f_total, f_up, f_down;
    std::uint64_t paths_returned = 0;
    std::uint64_t nodes_visited = 0;
};

// Backtracking enumeration over +-1 steps, pruned at first return; each
// returned path of length l carries weight 2^-l.
inline D1OracleResult d1_exhaustive_oracle(int L, int k_cap = 16) {
    if (L < 2 || L > 24 || L % 2 != 0)
        throw DomainError("d1_exhaustive_oracle: L must be even and in [2,24]");
    constexpr int kLevels = 6;
    const std::array<Coord, kLevels> levels = {1, -1, 2, -2, 3, -3};
    auto slot = [&](Coord lv) -> int {
        for (int i = 0; i < kLevels; ++i)
            if (levels[i] == lv) return i;
        return -1;
    };

    // scaled masses in units of 2^(-L)
    std::vector<std::vector<std::uint64_t>> tot(kLevels), up(kLevels), dn(kLevels);
    for (int i = 0; i < kLevels; ++i) {
        tot[i].assign(k_cap + 1, 0);
        up[i].assign(k_cap + 1, 0);
        dn[i].assign(k_cap + 1, 0);
    }
    std::uint64_t returned_scaled = 0;

    D1OracleResult res;
    res.L = L;

    std::array<int, kLevels> ct{}, cu{}, cd{};
    // iterative DFS: stack of (position, depth, next branch)
    struct Frame {
        Coord pos;
        int branch;  // 0: try +1 next, 1: try -1 next, 2: done
    };
    std::vector<Frame> stack;
    stack.reserve(L + 1);
    stack.push_back({0, 0});

    auto enter = [&](Coord prev, Coord next) {
        int s = slot(next);
        if (s >= 0) {
            ++ct[s];
            (std::llabs(prev) < std::llabs(next) ? ++cu[s] : ++cd[s]);
        }
    };
    auto leave = [&](Coord prev, Coord next) {
        int s = slot(next);
        if (s >= 0) {
            --ct[s];
            (std::llabs(prev) < std::llabs(next) ? --cu[s] : --cd[s]);
        }
    };

    while (!stack.empty()) {
        Frame& f = stack.back();
        int depth = static_cast<int>(stack.size()) - 1;
        if (f.branch >= 2 || depth >= L) {
            if (stack.size() >= 2) {
                Coord prev = stack[stack.size() - 2].pos;
                leave(prev, f.pos);
            }
            stack.pop_back();
            continue;
        }
        Coord next = f.pos + (f.branch == 0 ? 1 : -1);
        ++f.branch;
        ++res.nodes_visited;
        if (next == 0) {
            // first return at depth+1; weight 2^-(depth+1) = 2^(L-depth-1) units
            ++res.paths_returned;
            std::uint64_t w = std::uint64_t(1) << (L - depth - 1);
            returned_scaled += w;
            for (int i = 0; i < kLevels; ++i) {
                if (ct[i] <= k_cap) tot[i][ct[i]] += w;
                if (cu[i] <= k_cap) up[i][cu[i]] += w;
                if (cd[i] <= k_cap) dn[i][cd[i]] += w;
            }
            continue;
        }
        enter(f.pos, next);
        stack.push_back({next, 0});
    }

    BigInt denom = BigInt(1) << L;
    res.total_returned = Rational(BigInt(returned_scaled), denom);
    for (int i = 0; i < kLevels; ++i) {
        auto conv = [&](const std::vector<std::uint64_t>& v) {
            std::vector<Rational> out(v.size());
            for (std::size_t k = 0; k < v.size(); ++k) out[k] = Rational(BigInt(v[k]), denom);
            return out;
        };
        res.f_total[levels[i]] = conv(tot[i]);
        res.f_up[levels[i]] = conv(up[i]);
        res.f_down[levels[i]] = conv(dn[i]);
    }
    return res;
}

}  // namespace polya
