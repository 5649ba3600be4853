#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "polya/analytic.hpp"
#include "polya/common.hpp"
#include "polya/crossing.hpp"
#include "polya/empirical.hpp"
#include "polya/pmf.hpp"
#include "polya/report.hpp"
#include "polya/rng.hpp"
#include "polya/walk.hpp"

namespace polya {

// Conditioning setup for a kernel adjudication: records, per excursion, the
// joint of (parent-sum, child count) under both conditioner readings
// (directed-count sum as written, and total-visit sum).
struct ConditionalStudy {
    LatticeVector v;
    Direction dir = Direction::Up;
    KernelFamily family = KernelFamily::State;
};

struct ExperimentConfig {
    int dimension = 2;
    WalkKind walk = WalkKind::free();
    std::vector<std::int64_t> cutoff_ladder;  // strictly increasing
    std::uint64_t excursions_per_cutoff = 0;  // quota (>= 1000)
    std::uint64_t seed = 1;
    int workers = 1;
    std::vector<Target> targets;
    std::vector<ConditionalStudy> studies;

    void validate() const {
        if (dimension < 1 || dimension > kMaxWalkDim)
            throw DomainError("experiment: dimension must be in [1,8]");
        if (cutoff_ladder.empty()) throw DomainError("experiment: empty cutoff ladder");
        for (std::size_t i = 0; i + 1 < cutoff_ladder.size(); ++i)
            if (cutoff_ladder[i] >= cutoff_ladder[i + 1])
                throw DomainError("experiment: cutoff ladder must be strictly increasing");
        if (cutoff_ladder.front() < 2) throw DomainError("experiment: cutoffs must be >= 2");
        if (excursions_per_cutoff < 1000)
            throw DomainError("experiment: excursion quota must be >= 1000");
        if (workers < 1) throw DomainError("experiment: workers must be >= 1");
    }
};

using JointHist = std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t>;

struct McResults {
    ExperimentConfig config;               // with targets as actually tracked
    std::vector<std::size_t> study_child;  // child target index per study
    std::vector<std::vector<std::size_t>> study_parents;
    std::vector<std::uint64_t> rung_returned, rung_censored;
    // dists[target][rung][direction 0=up 1=down 2=total]
    std::vector<std::vector<std::array<EmpiricalDist, 3>>> dists;
    // joints[study][rung]
    std::vector<std::vector<JointHist>> joint_dir_sum, joint_total_sum;
    std::uint64_t audited_excursions = 0;

    const EmpiricalDist& dist(std::size_t target, std::size_t rung, Direction d) const {
        return dists[target][rung][d == Direction::Up ? 0 : d == Direction::Down ? 1 : 2];
    }
    double censored_fraction(std::size_t rung) const {
        return static_cast<double>(rung_censored[rung]) /
               static_cast<double>(config.excursions_per_cutoff);
    }
    std::size_t target_index(const Target& t) const {
        for (std::size_t i = 0; i < config.targets.size(); ++i)
            if (config.targets[i].name() == t.name()) return i;
        throw DomainError("target not tracked: " + t.name());
    }
};

namespace detail {

struct AuditPlan {
    // (lower shell target idx, upper shell target idx) for flow conservation
    std::vector<std::pair<std::size_t, std::size_t>> shell_pairs;
    // xclass idx -> member state target indices (only when all members tracked)
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> xclass_groups;
    std::vector<std::size_t> state_targets;  // for parity checks
    std::ptrdiff_t shell0 = -1;
    std::ptrdiff_t shell1 = -1;
};

inline AuditPlan build_audit_plan(const std::vector<Target>& targets) {
    AuditPlan plan;
    std::map<Coord, std::size_t> shells;
    std::map<std::string, std::size_t> by_name;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        by_name[targets[i].name()] = i;
        if (targets[i].kind == Target::Kind::Shell) shells[targets[i].shell_n] = i;
        if (targets[i].kind == Target::Kind::State) plan.state_targets.push_back(i);
    }
    for (const auto& [n, idx] : shells) {
        auto up = shells.find(n + 1);
        if (up != shells.end()) plan.shell_pairs.push_back({idx, up->second});
    }
    if (shells.count(0)) plan.shell0 = static_cast<std::ptrdiff_t>(shells[0]);
    if (shells.count(1)) plan.shell1 = static_cast<std::ptrdiff_t>(shells[1]);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i].kind != Target::Kind::XClass) continue;
        std::vector<std::size_t> members;
        bool complete = true;
        for (const auto& w : x_class(targets[i].v)) {
            auto it = by_name.find(Target::state(w).name());
            if (it == by_name.end()) { complete = false; break; }
            members.push_back(it->second);
        }
        if (complete) plan.xclass_groups.push_back({i, std::move(members)});
    }
    return plan;
}

// Exact per-path identities; any violation is a bug in the walk or the
// tracker, never a statistical fluctuation.
inline void audit_excursion(const std::vector<Target>& targets, const AuditPlan& plan,
                            const std::vector<CrossingTally>& t, std::int64_t tau,
                            std::uint64_t excursion) {
    auto fail = [&](const std::string& what) {
        throw AuditError("path audit violation at excursion " + std::to_string(excursion) +
                         " (tau=" + std::to_string(tau) + "): " + what);
    };
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i].kind == Target::Kind::ADirected) continue;
        if (t[i].undirected != t[i].up + t[i].down)
            fail(targets[i].name() + ": undirected != up + down");
    }
    for (const auto& [lo, hi] : plan.shell_pairs) {
        if (t[lo].down != t[hi].up)
            fail("flow: down[" + targets[lo].name() + "] != up[" + targets[hi].name() + "]");
    }
    for (const auto& [xi, members] : plan.xclass_groups) {
        std::uint64_t s = 0;
        for (std::size_t m : members) s += t[m].undirected;
        if (s != t[xi].undirected) fail(targets[xi].name() + ": xclass sum mismatch");
    }
    for (std::size_t i : plan.state_targets) {
        if (t[i].undirected > 0 && 2 * norm(targets[i].v) > tau)
            fail(targets[i].name() + ": parity/speed violation");
    }
    if (plan.shell0 >= 0 && t[static_cast<std::size_t>(plan.shell0)].down != 1)
        fail("down[N(0)] != 1");
    if (plan.shell1 >= 0 && t[static_cast<std::size_t>(plan.shell1)].up != 1)
        fail("up[N(1)] != 1");
}

}  // namespace detail

// Runs the Monte Carlo experiment once at the largest cutoff; each excursion
// is classified against every rung (tau <= cutoff counts as returned there),
// which realizes the censoring ladder on shared sample paths. Deterministic
// given the seed: excursion e always uses rng stream e, so the result does
// not depend on the worker count.
inline McResults run_mc(const ExperimentConfig& config_in) {
    ExperimentConfig config = config_in;
    config.validate();

    // studies imply tracked targets; dedupe by name
    std::vector<std::size_t> study_child;
    std::vector<std::vector<std::size_t>> study_parents;
    {
        std::map<std::string, std::size_t> index;
        auto add = [&](Target t) {
            auto it = index.find(t.name());
            if (it != index.end()) return it->second;
            config.targets.push_back(t);
            return index[config.targets.back().name()] = config.targets.size() - 1;
        };
        std::vector<Target> base = config.targets;
        config.targets.clear();
        for (auto& t : base) add(std::move(t));
        for (const auto& st : config.studies) {
            if (st.dir == Direction::Total)
                throw DomainError("conditional study: direction must be up or down");
            Target child = st.family == KernelFamily::State ? Target::state(st.v)
                                                            : Target::xclass(st.v);
            study_child.push_back(add(child));
            std::vector<std::size_t> parents;
            if (st.family == KernelFamily::State) {
                auto ms = st.dir == Direction::Up ? lower_set(st.v) : upper_set(st.v);
                for (auto& m : ms) parents.push_back(add(Target::state(std::move(m))));
            } else {
                if (st.dir == Direction::Up) {
                    for (auto& m : lower_set(st.v)) parents.push_back(add(Target::xclass(std::move(m))));
                } else {
                    for (auto& [m, r] : abs_upper_set(st.v))
                        parents.push_back(add(Target::xclass(std::move(m))));
                }
            }
            study_parents.push_back(std::move(parents));
        }
    }

    const std::size_t n_targets = config.targets.size();
    const std::size_t n_rungs = config.cutoff_ladder.size();
    const std::size_t n_studies = config.studies.size();
    const std::int64_t t_max = config.cutoff_ladder.back();
    const auto plan = detail::build_audit_plan(config.targets);

    struct Partial {
        std::vector<std::vector<std::array<EmpiricalDist, 3>>> dists;
        std::vector<std::vector<JointHist>> joint_dir, joint_tot;
        std::vector<std::uint64_t> returned, censored;
        std::uint64_t audited = 0;
        std::string error;
    };
    const int workers = config.workers;
    std::vector<Partial> partials(workers);
    const std::uint64_t quota = config.excursions_per_cutoff;
    const std::uint64_t chunk = (quota + workers - 1) / workers;

    auto body = [&](int w) {
        Partial& part = partials[w];
        part.dists.assign(n_targets, std::vector<std::array<EmpiricalDist, 3>>(n_rungs));
        part.joint_dir.assign(n_studies, std::vector<JointHist>(n_rungs));
        part.joint_tot.assign(n_studies, std::vector<JointHist>(n_rungs));
        part.returned.assign(n_rungs, 0);
        part.censored.assign(n_rungs, 0);
        Tracker tracker(config.targets, config.dimension);
        const std::uint64_t lo = w * chunk, hi = std::min<std::uint64_t>(quota, lo + chunk);
        try {
            for (std::uint64_t e = lo; e < hi; ++e) {
                PhiloxRng rng(config.seed, e);
                tracker.begin_excursion();
                auto out = run_excursion(rng, config.walk, config.dimension, t_max,
                                         [&](const std::int32_t* p, Coord pn,
                                             const std::int32_t* n, Coord nn) {
                                             tracker.observe_fast(p, pn, n, nn);
                                         });
                tracker.finalize(!out.returned());
                const auto& tl = tracker.tallies();
                if (out.returned()) {
                    ++part.audited;
                    detail::audit_excursion(config.targets, plan, tl, out.length, e);
                }
                for (std::size_t r = 0; r < n_rungs; ++r) {
                    if (!out.returned() || out.length > config.cutoff_ladder[r]) {
                        ++part.censored[r];
                        continue;
                    }
                    ++part.returned[r];
                    for (std::size_t t = 0; t < n_targets; ++t) {
                        part.dists[t][r][0].add(tl[t].up);
                        part.dists[t][r][1].add(tl[t].down);
                        part.dists[t][r][2].add(tl[t].undirected);
                    }
                    for (std::size_t s = 0; s < n_studies; ++s) {
                        std::uint64_t mdir = 0, mtot = 0;
                        for (std::size_t pi : study_parents[s]) {
                            mdir += config.studies[s].dir == Direction::Up ? tl[pi].up : tl[pi].down;
                            mtot += tl[pi].undirected;
                        }
                        std::uint64_t k = config.studies[s].dir == Direction::Up
                                              ? tl[study_child[s]].up
                                              : tl[study_child[s]].down;
                        ++part.joint_dir[s][r][{static_cast<std::uint32_t>(mdir),
                                                static_cast<std::uint32_t>(k)}];
                        ++part.joint_tot[s][r][{static_cast<std::uint32_t>(mtot),
                                                static_cast<std::uint32_t>(k)}];
                    }
                }
            }
        } catch (const std::exception& ex) {
            part.error = ex.what();
        }
    };

    if (workers == 1) {
        body(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (int w = 0; w < workers; ++w) threads.emplace_back(body, w);
        for (auto& th : threads) th.join();
    }

    for (const auto& p : partials)
        if (!p.error.empty()) throw AuditError(p.error);

    McResults res;
    res.config = config;
    res.study_child = std::move(study_child);
    res.study_parents = std::move(study_parents);
    res.rung_returned.assign(n_rungs, 0);
    res.rung_censored.assign(n_rungs, 0);
    res.dists.assign(n_targets, std::vector<std::array<EmpiricalDist, 3>>(n_rungs));
    res.joint_dir_sum.assign(n_studies, std::vector<JointHist>(n_rungs));
    res.joint_total_sum.assign(n_studies, std::vector<JointHist>(n_rungs));
    for (const auto& p : partials) {
        res.audited_excursions += p.audited;
        for (std::size_t r = 0; r < n_rungs; ++r) {
            res.rung_returned[r] += p.returned[r];
            res.rung_censored[r] += p.censored[r];
        }
        for (std::size_t t = 0; t < n_targets; ++t)
            for (std::size_t r = 0; r < n_rungs; ++r)
                for (int dd = 0; dd < 3; ++dd) res.dists[t][r][dd].merge(p.dists[t][r][dd]);
        for (std::size_t s = 0; s < n_studies; ++s)
            for (std::size_t r = 0; r < n_rungs; ++r) {
                for (const auto& [mk, c] : p.joint_dir[s][r]) res.joint_dir_sum[s][r][mk] += c;
                for (const auto& [mk, c] : p.joint_tot[s][r]) res.joint_total_sum[s][r][mk] += c;
            }
    }
    return res;
}

}  // namespace polya
