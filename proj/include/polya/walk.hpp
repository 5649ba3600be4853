#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "polya/common.hpp"
#include "polya/lattice.hpp"
#include "polya/rng.hpp"

namespace polya {

inline constexpr int kMaxWalkDim = 8;

// Walk domain. Box variants are constrained by the l1 norm ||.|| <= N (the
// defining formula governs, not the [-N,N]^d notation); blocked steps keep
// the state and consume a time step.
struct WalkKind {
    enum class Variant { Free, Reflected, Box, ReflectedBox };
    Variant variant = Variant::Free;
    Coord cap = 0;  // N for box variants, >= 1

    static WalkKind free() { return {Variant::Free, 0}; }
    static WalkKind reflected() { return {Variant::Reflected, 0}; }
    static WalkKind box(Coord n) {
        if (n < 1) throw DomainError("WalkKind::box: N must be >= 1");
        return {Variant::Box, n};
    }
    static WalkKind reflected_box(Coord n) {
        if (n < 1) throw DomainError("WalkKind::reflected_box: N must be >= 1");
        return {Variant::ReflectedBox, n};
    }

    std::string name() const {
        switch (variant) {
            case Variant::Free: return "free";
            case Variant::Reflected: return "reflected";
            case Variant::Box: return "box:" + std::to_string(cap);
            default: return "reflected-box:" + std::to_string(cap);
        }
    }
};

struct Step {
    int axis = 0;
    int sign = +1;
};

// Uniform over the 2d signed unit vectors; consumes exactly one 32-bit draw.
inline Step draw_step(PhiloxRng& rng, int d) {
    std::uint32_t idx = rng.uniform_below(static_cast<std::uint32_t>(2 * d));
    return {static_cast<int>(idx >> 1), (idx & 1u) ? -1 : +1};
}

namespace detail {
inline void check_state(const WalkKind& kind, const LatticeVector& s) {
    bool reflected = kind.variant == WalkKind::Variant::Reflected ||
                     kind.variant == WalkKind::Variant::ReflectedBox;
    bool boxed = kind.variant == WalkKind::Variant::Box ||
                 kind.variant == WalkKind::Variant::ReflectedBox;
    if (reflected)
        for (Coord c : s)
            if (c < 0) throw InvalidStateError("negative coordinate in reflected walk: " + to_string(s));
    if (boxed && norm(s) > kind.cap)
        throw InvalidStateError("state outside box of norm " + std::to_string(kind.cap) + ": " + to_string(s));
}
}  // namespace detail

// One transition of the chosen walk variant. Reflection flips the whole step
// when a coordinate would reach -1; the box cap blocks (state repeats).
inline LatticeVector apply_step(const WalkKind& kind, const LatticeVector& state, const Step& e) {
    detail::check_state(kind, state);
    if (e.axis < 0 || e.axis >= static_cast<int>(state.size()))
        throw DomainError("apply_step: axis out of range");
    LatticeVector next = state;
    next[e.axis] += e.sign;
    switch (kind.variant) {
        case WalkKind::Variant::Free:
            return next;
        case WalkKind::Variant::Reflected:
            if (next[e.axis] < 0) next[e.axis] = 1;  // state - e
            return next;
        case WalkKind::Variant::Box:
            if (norm(next) > kind.cap) return state;
            return next;
        default:  // ReflectedBox: the norm cap applies to the unreflected target
            if (norm(next) > kind.cap) return state;
            if (next[e.axis] < 0) next[e.axis] = 1;
            return next;
    }
}

struct ExcursionOutcome {
    enum class Status { Returned, Censored };
    Status status = Status::Censored;
    std::int64_t length = 0;  // tau if returned, t_max if censored

    bool returned() const { return status == Status::Returned; }
};

// Runs one excursion from the origin until first return or t_max steps.
// Every transition, including the closing step into the origin at tau, is fed
// to the observer as obs(prev, prev_norm, next, next_norm). Blocked box steps
// are fed with prev == next (equal norms).
template <class Observer>
ExcursionOutcome run_excursion(PhiloxRng& rng, const WalkKind& kind, int d, std::int64_t t_max,
                               Observer&& obs) {
    if (d < 1 || d > kMaxWalkDim) throw DomainError("run_excursion: d must be in [1,8]");
    if (t_max < 2) throw DomainError("run_excursion: t_max must be >= 2");
    std::array<std::int32_t, kMaxWalkDim> cur{};
    std::array<std::int32_t, kMaxWalkDim> prev{};
    Coord cnorm = 0;
    const bool reflect = kind.variant == WalkKind::Variant::Reflected ||
                         kind.variant == WalkKind::Variant::ReflectedBox;
    const bool boxed = kind.variant == WalkKind::Variant::Box ||
                       kind.variant == WalkKind::Variant::ReflectedBox;
    const Coord cap = kind.cap;
    const std::uint32_t faces = static_cast<std::uint32_t>(2 * d);

    for (std::int64_t t = 1; t <= t_max; ++t) {
        std::uint32_t idx = rng.uniform_below(faces);
        int axis = static_cast<int>(idx >> 1);
        std::int32_t sgn = (idx & 1u) ? -1 : +1;
        prev = cur;
        const Coord pnorm = cnorm;
        std::int32_t v = cur[axis];
        std::int32_t nv = v + sgn;
        Coord nnorm = pnorm + ((std::abs(nv) > std::abs(v)) ? 1 : -1);
        bool blocked = false;
        if (boxed && nnorm > cap) {
            blocked = true;
        } else if (reflect && nv < 0) {
            nv = 1;  // flip the step: the coordinate was 0, norm still grows
        }
        if (!blocked) {
            cur[axis] = nv;
            cnorm = nnorm;
        }
        obs(prev.data(), pnorm, cur.data(), cnorm);
        if (cnorm == 0) return {ExcursionOutcome::Status::Returned, t};
    }
    return {ExcursionOutcome::Status::Censored, t_max};
}

struct BdOutcome {
    bool extinct = false;
    std::int64_t jumps = 0;
    std::vector<std::uint64_t> g;  // g[n] = births at population n; g[0] = 1 on extinction
};

// Embedded jump chain of the birth-death process from population 1: each jump
// is a birth with probability lambda_n / (lambda_n + mu_n). Holding times are
// irrelevant for the g-counts, so they are not simulated. Rate lists index
// populations 1, 2, ...; the last entry repeats.
inline BdOutcome run_bd_excursion(PhiloxRng& rng, const std::vector<double>& lambdas,
                                  const std::vector<double>& mus, std::int64_t t_max) {
    if (lambdas.empty() || mus.empty())
        throw DomainError("run_bd_excursion: empty rate lists");
    for (double x : lambdas)
        if (!(x >= 0)) throw DomainError("run_bd_excursion: negative birth rate");
    for (double x : mus)
        if (!(x > 0)) throw DomainError("run_bd_excursion: death rates must be positive");
    auto rate = [](const std::vector<double>& v, std::size_t pop) {
        return v[pop - 1 < v.size() ? pop - 1 : v.size() - 1];
    };
    BdOutcome out;
    out.g.assign(2, 0);
    std::size_t pop = 1;
    for (std::int64_t t = 1; t <= t_max; ++t) {
        double lam = rate(lambdas, pop);
        double mu = rate(mus, pop);
        bool birth = rng.next_unit() * (lam + mu) < lam;
        ++out.jumps;
        if (birth) {
            if (pop + 1 >= out.g.size()) out.g.resize(pop + 2, 0);
            ++out.g[pop];
            ++pop;
        } else {
            --pop;
            if (pop == 0) {
                out.extinct = true;
                out.g[0] = 1;
                return out;
            }
        }
    }
    return out;  // censored: no extinction within t_max jumps
}

}  // namespace polya
