#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "polya/common.hpp"
#include "polya/pmf.hpp"

namespace polya {

// Histogram of an integer statistic over returned excursions.
struct EmpiricalDist {
    std::vector<std::uint64_t> counts;
    std::uint64_t n_returned = 0;
    std::uint64_t censored = 0;

    void add(std::uint64_t k) {
        if (k >= counts.size()) counts.resize(k + 1, 0);
        ++counts[k];
        ++n_returned;
    }

    void merge(const EmpiricalDist& o) {
        if (o.counts.size() > counts.size()) counts.resize(o.counts.size(), 0);
        for (std::size_t i = 0; i < o.counts.size(); ++i) counts[i] += o.counts[i];
        n_returned += o.n_returned;
        censored += o.censored;
    }

    double mean() const {
        if (n_returned == 0) return 0;
        double s = 0;
        for (std::size_t k = 1; k < counts.size(); ++k)
            s += static_cast<double>(k) * static_cast<double>(counts[k]);
        return s / static_cast<double>(n_returned);
    }

    double variance() const {
        if (n_returned == 0) return 0;
        double m = mean(), s = 0;
        for (std::size_t k = 0; k < counts.size(); ++k) {
            double dev = static_cast<double>(k) - m;
            s += dev * dev * static_cast<double>(counts[k]);
        }
        return s / static_cast<double>(n_returned);
    }

    double censored_fraction() const {
        std::uint64_t tot = n_returned + censored;
        return tot ? static_cast<double>(censored) / static_cast<double>(tot) : 0.0;
    }
};

struct BinCI {
    double lo = 0, hi = 0;
};

inline constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

inline BinCI wilson_interval(std::uint64_t count, std::uint64_t n, double z = kZ99) {
    if (n == 0) return {0, 1};
    double nn = static_cast<double>(n);
    double p = static_cast<double>(count) / nn;
    double z2 = z * z;
    double denom = 1.0 + z2 / nn;
    double center = (p + z2 / (2 * nn)) / denom;
    double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// Frequencies with per-bin Wilson intervals at 99%.
inline std::pair<Pmf, std::vector<BinCI>> empirical_pmf(const EmpiricalDist& e) {
    if (e.n_returned == 0) throw EmptySampleError("empirical_pmf: no returned excursions");
    Pmf p;
    p.masses.resize(std::max<std::size_t>(e.counts.size(), 1));
    std::vector<BinCI> cis(p.masses.size());
    for (std::size_t k = 0; k < p.masses.size(); ++k) {
        std::uint64_t c = k < e.counts.size() ? e.counts[k] : 0;
        p.masses[k] = static_cast<double>(c) / static_cast<double>(e.n_returned);
        cis[k] = wilson_interval(c, e.n_returned);
    }
    return {std::move(p), std::move(cis)};
}

// Total variation on truncated pmfs: half the l1 distance over the common
// (padded) support plus half the tail discrepancy.
inline double tv_distance(const Pmf& a, const Pmf& b) {
    std::size_t K = std::max(a.masses.size(), b.masses.size());
    double s = 0;
    for (std::size_t k = 0; k < K; ++k) s += std::fabs(a.at(k) - b.at(k));
    return 0.5 * s + 0.5 * std::fabs(a.tail - b.tail);
}

struct Chi2Result {
    double stat = 0;
    int dof = 0;
    double p_value = 1;
    int bins = 0;
};

// Goodness of fit of counts against an analytic law; adjacent bins (from the
// high end down) are merged until every expected count reaches min_expected.
// The analytic tail joins the last bin.
inline Chi2Result chi_square_gof(const EmpiricalDist& e, const Pmf& analytic,
                                 double min_expected = 5.0) {
    if (e.n_returned == 0) throw EmptySampleError("chi_square_gof: no returned excursions");
    const double n = static_cast<double>(e.n_returned);
    std::size_t K = std::max(e.counts.size(), analytic.masses.size());
    std::vector<double> exp_bins, obs_bins;
    double ecur = 0, ocur = 0;
    for (std::size_t k = 0; k < K; ++k) {
        ecur += n * analytic.at(k);
        ocur += static_cast<double>(k < e.counts.size() ? e.counts[k] : 0);
        if (ecur >= min_expected) {
            exp_bins.push_back(ecur);
            obs_bins.push_back(ocur);
            ecur = ocur = 0;
        }
    }
    ecur += n * analytic.tail;
    if (!exp_bins.empty() && ecur < min_expected) {
        exp_bins.back() += ecur;
        obs_bins.back() += ocur;
    } else {
        exp_bins.push_back(ecur);
        obs_bins.push_back(ocur);
    }
    Chi2Result r;
    r.bins = static_cast<int>(exp_bins.size());
    for (std::size_t i = 0; i < exp_bins.size(); ++i) {
        if (exp_bins[i] <= 0) continue;
        double d = obs_bins[i] - exp_bins[i];
        r.stat += d * d / exp_bins[i];
    }
    r.dof = std::max(1, r.bins - 1);
    r.p_value = boost::math::gamma_q(r.dof / 2.0, r.stat / 2.0);
    return r;
}

}  // namespace polya
