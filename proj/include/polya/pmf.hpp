#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "polya/common.hpp"

namespace polya {

// Probability mass vector over {0..k_max} plus the unassigned tail mass.
// Invariant: sum(masses) + tail = 1 within 1e-12, all entries >= 0.
struct Pmf {
    std::vector<double> masses;  // index k = 0..k_max
    double tail = 0.0;
    std::string label;

    std::size_t k_max() const { return masses.empty() ? 0 : masses.size() - 1; }

    double mass_sum() const {
        double s = 0;
        for (double m : masses) s += m;
        return s;
    }

    double at(std::size_t k) const { return k < masses.size() ? masses[k] : 0.0; }

    // Consumers must propagate the tail bound; this is the warning threshold.
    bool truncation_warning() const { return tail > 1e-6; }
};

inline Pmf point_mass(std::size_t k, std::size_t k_max = 0, std::string label = "") {
    Pmf p;
    p.masses.assign(std::max(k, k_max) + 1, 0.0);
    p.masses[k] = 1.0;
    p.label = std::move(label);
    return p;
}

// c[k] = sum_l a[l] * b[k-l]; every cross term touching either tail, and all
// mass pushed past the output cutoff, lands in the output tail.
inline Pmf convolve(const Pmf& a, const Pmf& b) {
    std::size_t K = std::max(a.k_max(), b.k_max());
    Pmf c;
    c.masses.assign(K + 1, 0.0);
    for (std::size_t i = 0; i < a.masses.size(); ++i) {
        if (a.masses[i] == 0.0) continue;
        std::size_t jmax = std::min(b.masses.size(), K + 1 - i);
        for (std::size_t j = 0; j < jmax; ++j) c.masses[i + j] += a.masses[i] * b.masses[j];
    }
    c.tail = std::max(0.0, 1.0 - c.mass_sum());
    return c;
}

// Binomial thinning: each unit of the counted variable survives independently
// with probability z. Tail mass stays in the tail (conservative) except for
// the exact z = 0 and z = 1 cases.
inline Pmf thin_pmf(const Pmf& p, double z, std::size_t K = 0) {
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("thin_pmf: z must lie in [0,1]");
    if (K == 0) K = p.k_max();
    Pmf out;
    out.masses.assign(K + 1, 0.0);
    if (z == 1.0) {
        for (std::size_t k = 0; k <= K; ++k) out.masses[k] = p.at(k);
        out.tail = std::max(0.0, 1.0 - out.mass_sum());
        return out;
    }
    if (z == 0.0) {
        out.masses[0] = 1.0;
        return out;
    }
    for (std::size_t l = 0; l < p.masses.size(); ++l) {
        if (p.masses[l] == 0.0) continue;
        // w(k) = C(l,k) z^k (1-z)^(l-k), built by recurrence
        double w = std::pow(1.0 - z, static_cast<double>(l));
        for (std::size_t k = 0; k <= l && k <= K; ++k) {
            out.masses[k] += p.masses[l] * w;
            w *= z / (1.0 - z) * static_cast<double>(l - k) / static_cast<double>(k + 1);
        }
    }
    out.tail = std::max(0.0, 1.0 - out.mass_sum());
    return out;
}

// (mean of the truncated part, k_max * tail as the unresolved-mass gap report)
inline std::pair<double, double> pmf_mean(const Pmf& p) {
    double m = 0;
    for (std::size_t k = 1; k < p.masses.size(); ++k) m += static_cast<double>(k) * p.masses[k];
    return {m, static_cast<double>(p.k_max()) * p.tail};
}

inline nlohmann::ordered_json to_json(const Pmf& p) {
    nlohmann::ordered_json j;
    j["k_max"] = p.k_max();
    j["masses"] = p.masses;
    j["tail"] = p.tail;
    j["label"] = p.label;
    return j;
}

inline Pmf pmf_from_json(const nlohmann::json& j) {
    Pmf p;
    p.masses = j.at("masses").get<std::vector<double>>();
    p.tail = j.at("tail").get<double>();
    p.label = j.at("label").get<std::string>();
    if (p.masses.size() != j.at("k_max").get<std::size_t>() + 1)
        throw DomainError("pmf_from_json: k_max does not match masses length");
    return p;
}

}  // namespace polya
