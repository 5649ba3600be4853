#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "polya/common.hpp"
#include "polya/kernels.hpp"
#include "polya/lattice.hpp"
#include "polya/pmf.hpp"
#include "polya/rational.hpp"
#include "polya/shells.hpp"

namespace polya {

// Which level's shell combinatorics drive the step into chain index j.
// DestinationLevel (step into R_j uses C(j), C0(j)) matches the birth-death
// derivation and is the default. SourceLevel is the literal transition
// indexing; it is degenerate at level 0, which we realize as an identity step
// so that the alternative still produces a comparable law.
enum class IndexConvention { DestinationLevel, SourceLevel };

namespace detail {

struct ChainStep {
    bool identity = false;
    double ratio = 0.0;  // lambda / (lambda + mu)
    Rational ratio_exact{0};
    Rational per_parent_mean{0};  // lambda / mu; 1 for identity steps
};

inline ChainStep step_from_rates(const Rational& lambda, const Rational& mu) {
    ChainStep s;
    if (lambda == 0 && mu == 0) {
        s.identity = true;
        s.per_parent_mean = 1;
        return s;
    }
    if (lambda <= 0 || mu <= 0) throw DomainError("chain step: rates must be positive");
    s.ratio_exact = Rational(lambda / (lambda + mu));
    s.ratio = to_double(s.ratio_exact);
    s.per_parent_mean = Rational(lambda / mu);
    return s;
}

inline std::vector<ChainStep> r_chain_steps(int d, int n, IndexConvention conv) {
    std::vector<ChainStep> steps;
    steps.reserve(n);
    for (int j = 1; j <= n; ++j) {
        int level = conv == IndexConvention::DestinationLevel ? j : j - 1;
        if (level == 0) {
            steps.push_back(step_from_rates(0, 0));
            continue;
        }
        ShellCombinatorics sc = shell_combinatorics(d, level);
        steps.push_back(step_from_rates(Rational(sc.c0 + sc.c), Rational(sc.c)));
    }
    return steps;
}

inline std::vector<ChainStep> v_chain_steps(const std::vector<double>& lambdas,
                                            const std::vector<double>& mus, int n,
                                            IndexConvention conv) {
    if (lambdas.empty() || mus.empty()) throw DomainError("v_chain: empty rate lists");
    auto at = [](const std::vector<double>& v, int pop) {
        return v[std::min<std::size_t>(pop - 1, v.size() - 1)];
    };
    std::vector<ChainStep> steps;
    steps.reserve(n);
    for (int j = 1; j <= n; ++j) {
        int pop = conv == IndexConvention::DestinationLevel ? j : j - 1;
        if (pop == 0) {
            steps.push_back(step_from_rates(0, 0));
            continue;
        }
        steps.push_back(step_from_rates(Rational(at(lambdas, pop)), Rational(at(mus, pop))));
    }
    return steps;
}

inline std::vector<double> propagate(const std::vector<ChainStep>& steps, int n, std::size_t K) {
    std::vector<double> law(K + 1, 0.0);
    law[1] = 1.0;
    for (int j = 1; j <= n; ++j) {
        const ChainStep& s = steps[j - 1];
        if (s.identity) continue;
        std::vector<double> next(K + 1, 0.0);
        fold_geometric_children(law, s.ratio, next, false);
        law.swap(next);
    }
    return law;
}

inline Pmf finish(std::vector<double> law, std::string label) {
    Pmf p;
    p.masses = std::move(law);
    p.tail = std::max(0.0, 1.0 - p.mass_sum());
    p.label = std::move(label);
    return p;
}

// Law of V_{n-1} + V_n. Consecutive chain values are dependent, so the sum is
// propagated through the conditional kernel, never by independent convolution.
inline Pmf chain_pair_sum(const std::vector<ChainStep>& steps, int n, std::size_t K,
                          std::string label) {
    std::vector<double> prev = propagate(steps, n - 1, K);
    const ChainStep& s = steps[n - 1];
    std::vector<double> sum(K + 1, 0.0);
    if (s.identity) {
        for (std::size_t m = 0; 2 * m <= K; ++m) sum[2 * m] += prev[m];
    } else {
        fold_geometric_children(prev, s.ratio, sum, true);
    }
    return finish(std::move(sum), std::move(label));
}

}  // namespace detail

// Galton-Watson generation law: offspring P{k} = 1/2^(k+1), Z_0 = 1.
inline Pmf gw_pmf(int n, std::size_t K = 200) {
    if (n < 0) throw DomainError("gw_pmf: n must be >= 0");
    std::vector<GeometricKernel> k{{0.5, ""}};
    Pmf p = branching_pmf(k, n, K);
    p.label = "Z_" + std::to_string(n);
    return p;
}

// Law of the shell-crossing chain R_n for the d-dimensional walk. R_0 = 1;
// the step into R_j draws, per parent unit, a geometric count with ratio
// (C0 + C)/(C0 + 2C) evaluated per the index convention.
inline Pmf r_pmf(int d, int n, std::size_t K = 200,
                 IndexConvention conv = IndexConvention::DestinationLevel) {
    if (n < 0) throw DomainError("r_pmf: n must be >= 0");
    auto steps = detail::r_chain_steps(d, n, conv);
    return detail::finish(detail::propagate(steps, n, K),
                          "R_" + std::to_string(n) + "(d=" + std::to_string(d) + ")");
}

// Birth-death generation law V_n for explicit rate ladders
// (lambdas[i], mus[i] are the rates at population i+1; the last entry repeats).
inline Pmf v_chain_pmf(const std::vector<double>& lambdas, const std::vector<double>& mus, int n,
                       std::size_t K = 200,
                       IndexConvention conv = IndexConvention::DestinationLevel) {
    if (n < 0) throw DomainError("v_chain_pmf: n must be >= 0");
    auto steps = detail::v_chain_steps(lambdas, mus, n, conv);
    return detail::finish(detail::propagate(steps, n, K), "V_" + std::to_string(n));
}

// Crossing law for the whole norm shell N(n): up is R_{n-1}, down is R_n,
// total is the dependent sum R_{n-1} + R_n.
inline Pmf shell_law(int d, int n, Direction dir, std::size_t K = 200,
                     IndexConvention conv = IndexConvention::DestinationLevel) {
    if (dir == Direction::Down) {
        if (n < 0) throw DomainError("shell_law: n must be >= 0");
        Pmf p = r_pmf(d, n, K, conv);
        p.label = "down[N(" + std::to_string(n) + ")]";
        return p;
    }
    if (n < 1) throw DomainError("shell_law: n must be >= 1 for up/total");
    if (dir == Direction::Up) {
        Pmf p = r_pmf(d, n - 1, K, conv);
        p.label = "up[N(" + std::to_string(n) + ")]";
        return p;
    }
    auto steps = detail::r_chain_steps(d, n, conv);
    return detail::chain_pair_sum(steps, n, K, "total[N(" + std::to_string(n) + ")]");
}

// One-dimensional level-crossing law: the Z-law halves onto k >= 1 and the
// k = 0 mass absorbs the normalization remainder.
inline Pmf d1_crossing_law(Coord level, Direction dir, std::size_t K = 200) {
    if (level == 0) throw ZeroVectorError("d1_crossing_law: level must be nonzero");
    int a = static_cast<int>(level < 0 ? -level : level);
    Pmf src;
    if (dir == Direction::Up) src = gw_pmf(a - 1, K);
    else if (dir == Direction::Down) src = gw_pmf(a, K);
    else {
        auto steps = detail::r_chain_steps(1, a, IndexConvention::DestinationLevel);
        src = detail::chain_pair_sum(steps, a, K, "");
    }
    Pmf out;
    out.masses.assign(K + 1, 0.0);
    double assigned = 0;
    for (std::size_t k = 1; k <= K; ++k) {
        out.masses[k] = 0.5 * src.masses[k];
        assigned += out.masses[k];
    }
    out.tail = 0.5 * src.tail;
    out.masses[0] = std::max(0.0, 1.0 - assigned - out.tail);
    out.label = std::string(to_string(dir)) + "(" + std::to_string(level) + ")";
    return out;
}

// Conditional expectations of the crossing counts, exact.
struct CrossingExpectations {
    Rational up, down, total;
    Rational up_xclass, down_xclass, total_xclass;
};

inline CrossingExpectations expected_crossings(const LatticeVector& v) {
    if (is_zero(v)) throw ZeroVectorError("expected_crossings: zero vector");
    const int d = static_cast<int>(v.size());
    const int d0 = count_profile(v).first;
    CrossingExpectations e;
    e.up = Rational(d - d0, 2 * d);
    e.down = Rational(d + d0, 2 * d);
    e.total = 1;
    BigInt scale = BigInt(1) << (d - d0);
    e.up_xclass = e.up * scale;
    e.down_xclass = e.down * scale;
    e.total_xclass = Rational(scale);
    return e;
}

enum class KernelFamily { State, XClass };

using StateKernel = std::variant<GeometricKernel, MixtureKernel>;

// The single-parent conditional crossing kernels. State family: pure
// geometric with ratio 1/(d - d0 + 1) (up) or 1/(d + d0 + 1) (down).
// X-class family: the two-component mixtures weighted by the d1 split (up)
// and the range-2 split (down).
inline StateKernel state_kernel(const LatticeVector& v, Direction dir, KernelFamily family) {
    if (is_zero(v)) throw ZeroVectorError("state_kernel: zero vector");
    if (dir == Direction::Total) throw DomainError("state_kernel: direction must be up or down");
    const int d = static_cast<int>(v.size());
    const auto [d0, d1] = count_profile(v);
    if (family == KernelFamily::State) {
        double denom = dir == Direction::Up ? d - d0 + 1 : d + d0 + 1;
        return GeometricKernel{1.0 / denom, ""};
    }
    MixtureKernel mk;
    if (dir == Direction::Up) {
        const int md = d - d0;
        double w1 = 2.0 * (md - d1) / (2.0 * md - d1);
        double w2 = static_cast<double>(d1) / (2.0 * md - d1);
        if (w1 > 0) mk.components.push_back({w1, GeometricKernel{1.0 / (md + 1), ""}});
        if (w2 > 0) {
            if (md + 1 <= 2) throw DomainError("state_kernel: degenerate xclass up kernel");
            mk.components.push_back({w2, GeometricKernel{2.0 / (md + 1), ""}});
        }
    } else {
        const int pd = d + d0;
        double w1 = 2.0 * d0 / pd;
        double w2 = static_cast<double>(d - d0) / pd;
        if (w1 > 0) {
            if (pd + 1 <= 2) throw DomainError("state_kernel: degenerate xclass down kernel");
            mk.components.push_back({w1, GeometricKernel{2.0 / (pd + 1), ""}});
        }
        if (w2 > 0) mk.components.push_back({w2, GeometricKernel{1.0 / (pd + 1), ""}});
    }
    return mk;
}

inline Pmf conditional_count_pmf(const StateKernel& k, int m, std::size_t K) {
    if (std::holds_alternative<GeometricKernel>(k))
        return conditional_count_pmf(std::get<GeometricKernel>(k), m, K);
    return conditional_count_pmf(std::get<MixtureKernel>(k), m, K);
}

inline double kernel_mean(const StateKernel& k) {
    if (std::holds_alternative<GeometricKernel>(k)) return std::get<GeometricKernel>(k).mean();
    return std::get<MixtureKernel>(k).mean();
}

// Exact mean of R_n: the product of per-step means lambda_j / mu_j.
inline Rational r_chain_mean(int d, int n, IndexConvention conv = IndexConvention::DestinationLevel) {
    if (n < 0) throw DomainError("r_chain_mean: n must be >= 0");
    Rational m = 1;
    for (const auto& s : detail::r_chain_steps(d, n, conv)) m *= s.per_parent_mean;
    return m;
}

// Exact shell sum of the per-state expectations: sum over ||m|| = n of
// (d -+ d0(m)) / (2d); Total gives the shell size.
inline Rational shell_expect_sum(int d, Coord n, Direction dir) {
    if (n < 1) throw DomainError("shell_expect_sum: n must be >= 1");
    Rational s = 0;
    for (const auto& m : enumerate_shell(d, n)) {
        int d0 = count_profile(m).first;
        if (dir == Direction::Up) s += Rational(d - d0, 2 * d);
        else if (dir == Direction::Down) s += Rational(d + d0, 2 * d);
        else s += 1;
    }
    return s;
}

}  // namespace polya
