#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polya/analytic.hpp"
#include "polya/common.hpp"
#include "polya/empirical.hpp"
#include "polya/harness.hpp"
#include "polya/oracle.hpp"
#include "polya/report.hpp"

namespace polya {

enum class IdentityKind {
    ShellLaw,          // empirical shell crossing law vs the shell-chain law
    StateExpectation,  // empirical mean crossings vs the exact expectation
    D1LevelLaw,        // d = 1 level law vs the closed-form half-law
    Thinning,          // A-directed law vs binomial thinning of the parent law
    KernelConditional, // flagged adjudication of the single-parent kernels
    BdChain,           // standalone birth-death simulator vs the V-chain law
    ReturnFraction     // returned fraction against stated bounds
};

inline const char* to_string(IdentityKind k) {
    switch (k) {
        case IdentityKind::ShellLaw: return "shell_law";
        case IdentityKind::StateExpectation: return "state_expectation";
        case IdentityKind::D1LevelLaw: return "d1_level_law";
        case IdentityKind::Thinning: return "thinning";
        case IdentityKind::KernelConditional: return "kernel_conditional";
        case IdentityKind::BdChain: return "bd_chain";
        default: return "return_fraction";
    }
}

struct IdentitySpec {
    IdentityKind kind = IdentityKind::ShellLaw;
    // shared parameters, used per kind
    LatticeVector v;
    std::int64_t level = 1;
    Direction dir = Direction::Total;
    KernelFamily family = KernelFamily::State;
    std::vector<LatticeVector> a_set;
    int condition_m = 1;
    std::size_t kmax = 200;
    double tol_tv = 0.05;
    double tol_rel = 0.10;
    double frac_lo = 0.0, frac_hi = 1.0;
    // bd_chain
    double bd_lambda = 1.0, bd_mu = 2.0;
    int bd_levels = 4;
    std::uint64_t bd_runs = 100000;
    std::int64_t bd_tmax = 1000000;
};

namespace detail {

// TV estimator fluctuation allowance used by the trend rule: a multinomial
// with B occupied bins and n samples has E|TV_hat - TV| of order sqrt(B/4n).
inline double tv_slack(std::size_t bins, std::uint64_t n) {
    if (n == 0) return 1.0;
    return kZ99 * std::sqrt(static_cast<double>(std::max<std::size_t>(bins, 1)) /
                            (4.0 * static_cast<double>(n)));
}

// Ladder trend rule: pass needs the final discrepancy within tolerance AND
// no discrepancy increase along the ladder beyond the overlap allowance.
inline bool trend_ok(const std::vector<double>& disc, const std::vector<double>& allowance) {
    for (std::size_t i = 0; i + 1 < disc.size(); ++i)
        if (disc[i + 1] > disc[i] + allowance[i] + allowance[i + 1]) return false;
    return true;
}

inline nlohmann::ordered_json bins_json(const EmpiricalDist& e) {
    auto [pmf, cis] = empirical_pmf(e);
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < pmf.masses.size(); ++k) {
        nlohmann::ordered_json b;
        b["k"] = k;
        b["count"] = k < e.counts.size() ? e.counts[k] : 0;
        b["freq"] = pmf.masses[k];
        b["ci_low"] = cis[k].lo;
        b["ci_high"] = cis[k].hi;
        j.push_back(std::move(b));
    }
    return j;
}

inline EmpiricalDist conditional_slice(const JointHist& joint, std::uint32_t m) {
    EmpiricalDist e;
    for (const auto& [mk, c] : joint) {
        if (mk.first != m) continue;
        if (mk.second >= e.counts.size()) e.counts.resize(mk.second + 1, 0);
        e.counts[mk.second] += c;
        e.n_returned += c;
    }
    return e;
}

struct LawRow {
    std::vector<LadderPoint> ladder;
    bool pass = false;
};

// Common machinery for identities that compare an empirical law per rung
// against a fixed analytic pmf, with TV as the headline metric.
inline LawRow law_ladder(const McResults& mc, std::size_t target, Direction dir,
                         const Pmf& analytic, double tol_tv) {
    LawRow out;
    std::vector<double> disc, allow;
    for (std::size_t r = 0; r < mc.config.cutoff_ladder.size(); ++r) {
        const EmpiricalDist& e = mc.dist(target, r, dir);
        LadderPoint p;
        p.cutoff = mc.config.cutoff_ladder[r];
        p.n_returned = e.n_returned;
        p.censored_frac = mc.censored_fraction(r);
        if (e.n_returned == 0) {
            out.ladder.push_back(p);
            disc.push_back(1.0);
            allow.push_back(1.0);
            continue;
        }
        auto [emp, cis] = empirical_pmf(e);
        p.estimate = e.mean();
        double half = kZ99 * std::sqrt(e.variance() / static_cast<double>(e.n_returned));
        p.ci_low = p.estimate - half;
        p.ci_high = p.estimate + half;
        p.has_tv = true;
        p.tv = tv_distance(emp, analytic);
        auto chi = chi_square_gof(e, analytic);
        p.has_chi2 = true;
        p.chi2_stat = chi.stat;
        p.chi2_p = chi.p_value;
        disc.push_back(p.tv);
        allow.push_back(tv_slack(static_cast<std::size_t>(chi.bins), e.n_returned));
        out.ladder.push_back(p);
    }
    out.pass = !out.ladder.empty() && out.ladder.back().has_tv &&
               out.ladder.back().tv <= tol_tv && trend_ok(disc, allow);
    return out;
}

}  // namespace detail

// Flagged adjudication of the single-parent conditional kernels: the
// empirical conditional law under both conditioner readings, against both the
// stated kernel and the expectation-calibrated alternative. Never pass/fail.
inline IdentityReport kernel_adjudicator(const McResults& mc, std::size_t study_idx,
                                         const IdentitySpec& spec) {
    const ConditionalStudy& st = mc.config.studies[study_idx];
    IdentityReport rep;
    rep.identity = "kernel_conditional";
    rep.target = (st.family == KernelFamily::State ? Target::state(st.v) : Target::xclass(st.v))
                     .name();
    rep.verdict = "flagged";

    StateKernel stated = state_kernel(st.v, st.dir, st.family);
    const std::size_t K = 64;
    Pmf pred_stated = conditional_count_pmf(stated, spec.condition_m, K);
    pred_stated.label = "stated_kernel_m" + std::to_string(spec.condition_m);

    // Alternative calibrated so composing kernel means with the parent-sum
    // expectation reproduces the exact state expectation.
    CrossingExpectations ec = expected_crossings(st.v);
    Rational child_mean = st.dir == Direction::Up
                              ? (st.family == KernelFamily::State ? ec.up : ec.up_xclass)
                              : (st.family == KernelFamily::State ? ec.down : ec.down_xclass);
    Rational parent_mean = 0;
    if (st.family == KernelFamily::State) {
        auto ms = st.dir == Direction::Up ? lower_set(st.v) : upper_set(st.v);
        for (const auto& m : ms) {
            CrossingExpectations em = expected_crossings(m);
            parent_mean += st.dir == Direction::Up ? em.up : em.down;
        }
    } else {
        auto ms = st.dir == Direction::Up ? lower_set(st.v) : upper_set(st.v);
        for (const auto& m : ms) {
            CrossingExpectations em = expected_crossings(m);
            parent_mean += st.dir == Direction::Up ? em.up_xclass : em.down_xclass;
        }
    }
    nlohmann::ordered_json detail;
    detail["condition_m"] = spec.condition_m;
    detail["prediction_stated_kernel"] = to_json(pred_stated);
    bool have_alt = parent_mean > 0;
    Pmf pred_alt;
    if (have_alt) {
        double mu_star = to_double(child_mean / parent_mean);
        GeometricKernel alt{mu_star / (1.0 + mu_star), "expectation_calibrated"};
        pred_alt = conditional_count_pmf(alt, spec.condition_m, K);
        pred_alt.label = "expectation_calibrated_m" + std::to_string(spec.condition_m);
        detail["prediction_expectation_calibrated"] = to_json(pred_alt);
        detail["expectation_calibrated_ratio"] = alt.ratio;
    }

    auto m = static_cast<std::uint32_t>(spec.condition_m);
    const char* names[2] = {"conditioner_directed_sum", "conditioner_total_sum"};
    const std::vector<JointHist>* joints[2] = {&mc.joint_dir_sum[study_idx],
                                               &mc.joint_total_sum[study_idx]};
    double last_mean = 0, last_tv = 0;
    std::uint64_t last_n = 0;
    for (int variant = 0; variant < 2; ++variant) {
        nlohmann::ordered_json vj = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < mc.config.cutoff_ladder.size(); ++r) {
            EmpiricalDist e = detail::conditional_slice((*joints[variant])[r], m);
            nlohmann::ordered_json rj;
            rj["cutoff"] = mc.config.cutoff_ladder[r];
            rj["n_conditioned"] = e.n_returned;
            if (e.n_returned < 500) {
                rj["insufficient"] = true;  // InsufficientConditionedSample policy
            } else {
                rj["bins"] = detail::bins_json(e);
                rj["mean"] = e.mean();
                auto [emp, cis] = empirical_pmf(e);
                rj["tv_vs_stated"] = tv_distance(emp, pred_stated);
                if (have_alt) rj["tv_vs_expectation_calibrated"] = tv_distance(emp, pred_alt);
                if (variant == 0 && r + 1 == mc.config.cutoff_ladder.size()) {
                    last_mean = e.mean();
                    last_tv = tv_distance(emp, pred_stated);
                    last_n = e.n_returned;
                }
            }
            vj.push_back(std::move(rj));
        }
        detail[names[variant]] = std::move(vj);
    }
    rep.detail = std::move(detail);
    auto [pm, gap] = pmf_mean(pred_stated);
    rep.has_analytic = true;
    rep.analytic = pm;
    LadderPoint p;
    p.cutoff = mc.config.cutoff_ladder.back();
    p.n_returned = last_n;
    p.censored_frac = mc.censored_fraction(mc.config.cutoff_ladder.size() - 1);
    p.estimate = last_mean;
    p.has_tv = last_n > 0;
    p.tv = last_tv;
    rep.ladder.push_back(p);
    if (last_n == 0)
        throw InsufficientConditionedSample(
            "kernel_conditional: fewer than 500 conditioned excursions at every cutoff");
    return rep;
}

// Evaluates the identity list against Monte Carlo results and assembles the
// verification report. Flagged identities never fail the suite.
inline VerificationReport adjudicate(const McResults& mc, const std::vector<IdentitySpec>& specs) {
    VerificationReport report;
    report.config_echo["dimension"] = mc.config.dimension;
    report.config_echo["walk"] = mc.config.walk.name();
    report.config_echo["cutoff_ladder"] = mc.config.cutoff_ladder;
    report.config_echo["excursions_per_cutoff"] = mc.config.excursions_per_cutoff;
    report.config_echo["seed"] = mc.config.seed;
    report.config_echo["workers"] = mc.config.workers;

    std::size_t next_study = 0;
    for (const auto& spec : specs) {
        IdentityReport rep;
        rep.identity = to_string(spec.kind);
        switch (spec.kind) {
            case IdentityKind::ShellLaw: {
                Pmf analytic = shell_law(mc.config.dimension, static_cast<int>(spec.level),
                                         spec.dir, spec.kmax);
                std::size_t ti = mc.target_index(Target::shell(spec.level));
                auto row = detail::law_ladder(mc, ti, spec.dir, analytic, spec.tol_tv);
                rep.target = analytic.label;
                rep.ladder = std::move(row.ladder);
                rep.has_analytic = true;
                rep.analytic = pmf_mean(analytic).first;
                rep.verdict = row.pass ? "pass" : "fail";
                break;
            }
            case IdentityKind::D1LevelLaw: {
                if (mc.config.dimension != 1)
                    throw DomainError("d1_level_law requires a dimension-1 experiment");
                Pmf analytic = d1_crossing_law(spec.level, spec.dir, spec.kmax);
                std::size_t ti = mc.target_index(Target::state({spec.level}));
                auto row = detail::law_ladder(mc, ti, spec.dir, analytic, spec.tol_tv);
                rep.target = analytic.label;
                rep.ladder = std::move(row.ladder);
                rep.has_analytic = true;
                rep.analytic = pmf_mean(analytic).first;
                rep.verdict = row.pass ? "pass" : "fail";
                break;
            }
            case IdentityKind::StateExpectation: {
                CrossingExpectations ec = expected_crossings(spec.v);
                Rational target_val = spec.dir == Direction::Up ? ec.up
                                      : spec.dir == Direction::Down ? ec.down
                                                                    : ec.total;
                double analytic = to_double(target_val);
                std::size_t ti = mc.target_index(Target::state(spec.v));
                std::vector<double> disc, allow;
                for (std::size_t r = 0; r < mc.config.cutoff_ladder.size(); ++r) {
                    const EmpiricalDist& e = mc.dist(ti, r, spec.dir);
                    LadderPoint p;
                    p.cutoff = mc.config.cutoff_ladder[r];
                    p.n_returned = e.n_returned;
                    p.censored_frac = mc.censored_fraction(r);
                    if (e.n_returned > 0) {
                        p.estimate = e.mean();
                        double half =
                            kZ99 * std::sqrt(e.variance() / static_cast<double>(e.n_returned));
                        p.ci_low = p.estimate - half;
                        p.ci_high = p.estimate + half;
                        disc.push_back(std::fabs(p.estimate - analytic));
                        allow.push_back(half);
                    } else {
                        disc.push_back(analytic);
                        allow.push_back(analytic);
                    }
                    rep.ladder.push_back(p);
                }
                rep.target = Target::state(spec.v).name() + "/" + to_string(spec.dir);
                rep.has_analytic = true;
                rep.analytic = analytic;
                bool pass = !rep.ladder.empty() && rep.ladder.back().n_returned > 0 &&
                            disc.back() <= spec.tol_rel * std::fabs(analytic) &&
                            detail::trend_ok(disc, allow);
                rep.verdict = pass ? "pass" : "fail";
                break;
            }
            case IdentityKind::Thinning: {
                // z is the cardinality ratio of A within its one-sided neighbor set
                Target at = Target::a_directed(spec.v, spec.a_set);
                std::size_t ai = mc.target_index(at);
                std::size_t vi = mc.target_index(Target::state(spec.v));
                auto lo = lower_set(spec.v);
                auto up = upper_set(spec.v);
                bool all_lower = true, all_upper = true;
                for (const auto& a : spec.a_set) {
                    if (std::find(lo.begin(), lo.end(), a) == lo.end()) all_lower = false;
                    if (std::find(up.begin(), up.end(), a) == up.end()) all_upper = false;
                }
                if (!all_lower && !all_upper)
                    throw DomainError("thinning identity requires A within one neighbor side");
                Direction parent_dir = all_lower ? Direction::Up : Direction::Down;
                double z = static_cast<double>(spec.a_set.size()) /
                           static_cast<double>(all_lower ? lo.size() : up.size());
                std::vector<double> disc, allow;
                for (std::size_t r = 0; r < mc.config.cutoff_ladder.size(); ++r) {
                    const EmpiricalDist& ea = mc.dist(ai, r, Direction::Total);
                    const EmpiricalDist& ep = mc.dist(vi, r, parent_dir);
                    LadderPoint p;
                    p.cutoff = mc.config.cutoff_ladder[r];
                    p.n_returned = ea.n_returned;
                    p.censored_frac = mc.censored_fraction(r);
                    if (ea.n_returned > 0) {
                        auto [emp_a, ca] = empirical_pmf(ea);
                        auto [emp_p, cp] = empirical_pmf(ep);
                        Pmf thinned = thin_pmf(emp_p, z);
                        p.estimate = ea.mean();
                        p.has_tv = true;
                        p.tv = tv_distance(emp_a, thinned);
                        disc.push_back(p.tv);
                        allow.push_back(detail::tv_slack(emp_a.masses.size(), ea.n_returned) +
                                        detail::tv_slack(emp_p.masses.size(), ep.n_returned));
                    } else {
                        disc.push_back(1);
                        allow.push_back(1);
                    }
                    rep.ladder.push_back(p);
                }
                rep.target = at.name();
                rep.detail["z"] = z;
                bool pass = !rep.ladder.empty() && rep.ladder.back().has_tv &&
                            rep.ladder.back().tv <= spec.tol_tv && detail::trend_ok(disc, allow);
                rep.verdict = pass ? "pass" : "fail";
                break;
            }
            case IdentityKind::KernelConditional: {
                if (next_study >= mc.config.studies.size())
                    throw DomainError("kernel_conditional identity without a matching study");
                std::size_t study = next_study++;
                try {
                    rep = kernel_adjudicator(mc, study, spec);
                } catch (const InsufficientConditionedSample& e) {
                    // still a flagged row, never a suite failure
                    rep.identity = "kernel_conditional";
                    rep.target = (mc.config.studies[study].family == KernelFamily::State
                                      ? Target::state(mc.config.studies[study].v)
                                      : Target::xclass(mc.config.studies[study].v))
                                     .name();
                    rep.verdict = "flagged";
                    rep.detail["insufficient"] = true;
                    rep.detail["note"] = e.what();
                    LadderPoint p;
                    p.cutoff = mc.config.cutoff_ladder.back();
                    p.censored_frac =
                        mc.censored_fraction(mc.config.cutoff_ladder.size() - 1);
                    rep.ladder.push_back(p);
                }
                break;
            }
            case IdentityKind::BdChain: {
                // standalone simulation; rates are constant so the index
                // conventions coincide and the comparison is unambiguous
                std::vector<EmpiricalDist> g_hist(spec.bd_levels + 1);
                std::uint64_t extinct = 0;
                for (std::uint64_t run = 0; run < spec.bd_runs; ++run) {
                    PhiloxRng rng(mc.config.seed ^ 0xbdbdbdbdULL, run);
                    auto out = run_bd_excursion(rng, {spec.bd_lambda}, {spec.bd_mu}, spec.bd_tmax);
                    if (!out.extinct) continue;
                    ++extinct;
                    for (int n = 0; n <= spec.bd_levels; ++n)
                        g_hist[n].add(n < static_cast<int>(out.g.size()) ? out.g[n] : 0);
                }
                double worst_tv = 0;
                nlohmann::ordered_json levels = nlohmann::ordered_json::array();
                for (int n = 0; n <= spec.bd_levels; ++n) {
                    Pmf analytic = v_chain_pmf({spec.bd_lambda}, {spec.bd_mu}, n, spec.kmax);
                    auto [emp, cis] = empirical_pmf(g_hist[n]);
                    double tv = tv_distance(emp, analytic);
                    worst_tv = std::max(worst_tv, tv);
                    nlohmann::ordered_json lj;
                    lj["n"] = n;
                    lj["tv"] = tv;
                    lj["mean"] = g_hist[n].mean();
                    lj["analytic_mean"] = pmf_mean(analytic).first;
                    levels.push_back(std::move(lj));
                }
                rep.target = "g(n), n<=" + std::to_string(spec.bd_levels);
                rep.detail["levels"] = std::move(levels);
                rep.detail["extinct_fraction"] =
                    static_cast<double>(extinct) / static_cast<double>(spec.bd_runs);
                LadderPoint p;
                p.cutoff = spec.bd_tmax;
                p.n_returned = extinct;
                p.censored_frac = 1.0 - static_cast<double>(extinct) /
                                            static_cast<double>(spec.bd_runs);
                p.estimate = worst_tv;
                p.has_tv = true;
                p.tv = worst_tv;
                rep.ladder.push_back(p);
                rep.verdict = worst_tv <= spec.tol_tv ? "pass" : "fail";
                break;
            }
            case IdentityKind::ReturnFraction: {
                for (std::size_t r = 0; r < mc.config.cutoff_ladder.size(); ++r) {
                    LadderPoint p;
                    p.cutoff = mc.config.cutoff_ladder[r];
                    p.n_returned = mc.rung_returned[r];
                    p.censored_frac = mc.censored_fraction(r);
                    p.estimate = 1.0 - p.censored_frac;
                    auto ci = wilson_interval(mc.rung_returned[r],
                                              mc.config.excursions_per_cutoff);
                    p.ci_low = ci.lo;
                    p.ci_high = ci.hi;
                    rep.ladder.push_back(p);
                }
                rep.target = "returned_fraction";
                rep.detail["bounds"] = {spec.frac_lo, spec.frac_hi};
                double est = rep.ladder.back().estimate;
                rep.verdict = est >= spec.frac_lo && est <= spec.frac_hi ? "pass" : "fail";
                break;
            }
        }
        report.rows.push_back(std::move(rep));
    }
    // chi-square significance at 1% with Bonferroni correction across the
    // report's identity rows; informational only, TV is the headline metric
    const double alpha = 0.01 / static_cast<double>(std::max<std::size_t>(1, report.rows.size()));
    for (auto& row : report.rows) {
        bool any = false, sig = false;
        for (const auto& p : row.ladder)
            if (p.has_chi2) {
                any = true;
                if (&p == &row.ladder.back()) sig = p.chi2_p < alpha;
            }
        if (any) {
            row.detail["chi2_alpha_bonferroni"] = alpha;
            row.detail["chi2_significant"] = sig;
        }
    }
    return report;
}

}  // namespace polya
