#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "polya/common.hpp"
#include "polya/lattice.hpp"
#include "polya/pmf.hpp"

namespace polya {

// One-parameter geometric law P{k} = (1 - ratio) * ratio^k, k >= 0.
struct GeometricKernel {
    double ratio = 0.5;
    std::string label;

    double mean() const { return ratio / (1.0 - ratio); }
};

// Convex combination of geometric kernels (the X-class conditional kernels).
struct MixtureKernel {
    std::vector<std::pair<double, GeometricKernel>> components;
    std::string label;

    double mean() const {
        double m = 0;
        for (const auto& [w, g] : components) m += w * g.mean();
        return m;
    }
    double weight_sum() const {
        double s = 0;
        for (const auto& [w, g] : components) s += w;
        return s;
    }
};

inline Pmf geometric_pmf(const GeometricKernel& g, std::size_t K) {
    if (!(g.ratio > 0.0 && g.ratio < 1.0))
        throw DomainError("geometric_pmf: ratio must lie in (0,1)");
    Pmf p;
    p.masses.resize(K + 1);
    double m = 1.0 - g.ratio;
    for (std::size_t k = 0; k <= K; ++k) {
        p.masses[k] = m;
        m *= g.ratio;
    }
    p.tail = std::pow(g.ratio, static_cast<double>(K + 1));
    p.label = g.label;
    return p;
}

inline Pmf kernel_pmf(const MixtureKernel& mk, std::size_t K) {
    if (std::fabs(mk.weight_sum() - 1.0) > 1e-12)
        throw DomainError("kernel_pmf: mixture weights must sum to 1");
    Pmf p;
    p.masses.assign(K + 1, 0.0);
    p.tail = 0;
    for (const auto& [w, g] : mk.components) {
        if (w == 0.0) continue;
        Pmf comp = geometric_pmf(g, K);
        for (std::size_t k = 0; k <= K; ++k) p.masses[k] += w * comp.masses[k];
        p.tail += w * comp.tail;
    }
    p.label = mk.label;
    return p;
}

namespace detail {

// Accumulate P{parent = m} * NegBin(m, ratio) rows into `child`, optionally
// shifting row m by `m` positions (used for the dependent pair sum V_{n-1}+V_n).
// NegBin(m)[k] = C(m+k-1, k) (1-p)^m p^k is the m-fold convolution of the
// geometric kernel; rows are generated by recurrence in O(K) each.
inline void fold_geometric_children(const std::vector<double>& parent, double ratio,
                                    std::vector<double>& child, bool shift_by_parent) {
    const std::size_t K = child.size() - 1;
    const double q = 1.0 - ratio;
    child[0] += parent[0];  // m = 0 parents spawn nothing (and shift 0)
    double qm = 1.0;        // (1-p)^m
    for (std::size_t m = 1; m < parent.size(); ++m) {
        qm *= q;
        const std::size_t base = shift_by_parent ? m : 0;
        if (base > K) break;
        if (parent[m] == 0.0 || qm < 1e-320) continue;
        double row = qm;
        const double pm = parent[m];
        for (std::size_t k = 0; base + k <= K; ++k) {
            child[base + k] += pm * row;
            row *= ratio * static_cast<double>(m + k) / static_cast<double>(k + 1);
        }
    }
}

}  // namespace detail

// Law of the sum of m independent copies of the kernel (m-fold convolution).
inline Pmf conditional_count_pmf(const GeometricKernel& g, int m, std::size_t K) {
    if (m < 1) throw DomainError("conditional_count_pmf: m must be >= 1");
    if (!(g.ratio > 0.0 && g.ratio < 1.0))
        throw DomainError("conditional_count_pmf: ratio must lie in (0,1)");
    std::vector<double> parent(static_cast<std::size_t>(m) + 1, 0.0);
    parent[static_cast<std::size_t>(m)] = 1.0;
    Pmf out;
    out.masses.assign(K + 1, 0.0);
    detail::fold_geometric_children(parent, g.ratio, out.masses, false);
    out.tail = std::max(0.0, 1.0 - out.mass_sum());
    return out;
}

inline Pmf conditional_count_pmf(const MixtureKernel& mk, int m, std::size_t K) {
    if (m < 1) throw DomainError("conditional_count_pmf: m must be >= 1");
    Pmf acc = kernel_pmf(mk, K);
    Pmf one = acc;
    for (int i = 1; i < m; ++i) acc = convolve(acc, one);
    return acc;
}

// Inhomogeneous branching chain: V_0 = 1 and, given V_{j-1} = m, V_j is a sum
// of m independent draws from kernels[j-1] (kernels repeat their last entry
// when the list is shorter than n).
inline Pmf branching_pmf(const std::vector<GeometricKernel>& kernels, int n, std::size_t K) {
    if (n < 0) throw DomainError("branching_pmf: n must be >= 0");
    if (n > 0 && kernels.empty()) throw DomainError("branching_pmf: no kernels given");
    std::vector<double> law(K + 1, 0.0);
    law[1] = 1.0;
    for (int j = 1; j <= n; ++j) {
        const auto& g = kernels[std::min<std::size_t>(j - 1, kernels.size() - 1)];
        if (!(g.ratio > 0.0 && g.ratio < 1.0))
            throw DomainError("branching_pmf: kernel ratio must lie in (0,1)");
        std::vector<double> next(K + 1, 0.0);
        detail::fold_geometric_children(law, g.ratio, next, false);
        law.swap(next);
    }
    Pmf out;
    out.masses = std::move(law);
    out.tail = std::max(0.0, 1.0 - out.mass_sum());
    return out;
}

}  // namespace polya
