#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polya/common.hpp"
#include "polya/lattice.hpp"
#include "polya/walk.hpp"

namespace polya {

// What a tracker counts entries into. State and XClass need v != 0; Shell(0)
// is allowed (its only entry is the closing step, a down-crossing); ADirected
// restricts entries into v to those arriving from the subset A of neighbors.
struct Target {
    enum class Kind { State, Shell, XClass, ADirected };
    Kind kind = Kind::State;
    LatticeVector v;
    Coord shell_n = 0;
    std::vector<LatticeVector> a_set;

    static Target state(LatticeVector vec) { return {Kind::State, std::move(vec), 0, {}}; }
    static Target shell(Coord n) { return {Kind::Shell, {}, n, {}}; }
    static Target xclass(LatticeVector vec) { return {Kind::XClass, std::move(vec), 0, {}}; }
    static Target a_directed(LatticeVector vec, std::vector<LatticeVector> a) {
        return {Kind::ADirected, std::move(vec), 0, std::move(a)};
    }

    std::string name() const {
        switch (kind) {
            case Kind::State: return "state:" + to_string(v);
            case Kind::Shell: return "shell:" + std::to_string(shell_n);
            case Kind::XClass: return "xclass:" + to_string(v);
            default: {
                std::string s = "adirected:" + to_string(v) + "|A=";
                for (std::size_t i = 0; i < a_set.size(); ++i) {
                    if (i) s += ';';
                    s += to_string(a_set[i]);
                }
                return s;
            }
        }
    }
};

// Per-excursion counts. undirected = up + down holds for every kind (for
// ADirected the split is by A's lower/upper part).
struct CrossingTally {
    std::uint64_t undirected = 0;
    std::uint64_t up = 0;
    std::uint64_t down = 0;
};

class Tracker {
public:
    Tracker(std::vector<Target> targets, int d) : targets_(std::move(targets)), d_(d) {
        if (d < 1 || d > kMaxWalkDim) throw InvalidTargetError("tracker: d must be in [1,8]");
        compiled_.reserve(targets_.size());
        Coord max_norm = 0;
        for (const auto& t : targets_) {
            Compiled c;
            c.kind = t.kind;
            switch (t.kind) {
                case Target::Kind::Shell:
                    if (t.shell_n < 0) throw InvalidTargetError("shell level must be >= 0");
                    c.tnorm = t.shell_n;
                    break;
                case Target::Kind::State:
                case Target::Kind::XClass: {
                    check_dim(t.v);
                    if (is_zero(t.v))
                        throw InvalidTargetError(t.name() + ": zero vector target");
                    c.tnorm = norm(t.v);
                    const LatticeVector& ref = t.kind == Target::Kind::XClass ? abs_of(t.v) : t.v;
                    c.coords = to_i32(ref);
                    break;
                }
                case Target::Kind::ADirected: {
                    check_dim(t.v);
                    if (is_zero(t.v))
                        throw InvalidTargetError(t.name() + ": zero vector target");
                    if (t.a_set.empty())
                        throw InvalidTargetError(t.name() + ": empty A set");
                    c.tnorm = norm(t.v);
                    c.coords = to_i32(t.v);
                    auto lo = lower_set(t.v);
                    auto up = upper_set(t.v);
                    for (const auto& a : t.a_set) {
                        check_dim(a);
                        bool in_lo = std::find(lo.begin(), lo.end(), a) != lo.end();
                        bool in_up = std::find(up.begin(), up.end(), a) != up.end();
                        if (!in_lo && !in_up)
                            throw InvalidTargetError(t.name() + ": " + to_string(a) +
                                                     " is not a neighbor of the target state");
                        (in_lo ? c.a_lower : c.a_upper).push_back(to_i32(a));
                    }
                    break;
                }
            }
            max_norm = std::max(max_norm, c.tnorm);
            compiled_.push_back(std::move(c));
        }
        buckets_.assign(static_cast<std::size_t>(max_norm) + 1, {});
        for (std::uint32_t i = 0; i < compiled_.size(); ++i)
            buckets_[static_cast<std::size_t>(compiled_[i].tnorm)].push_back(i);
        tallies_.assign(compiled_.size(), {});
    }

    int dimension() const { return d_; }
    const std::vector<Target>& targets() const { return targets_; }

    void begin_excursion() {
        std::fill(tallies_.begin(), tallies_.end(), CrossingTally{});
        censored_ = false;
        finalized_ = false;
    }

    // Hot path: called once per step with raw coordinate arrays and norms.
    inline void observe_fast(const std::int32_t* prev, Coord pnorm, const std::int32_t* next,
                             Coord nnorm) {
        if (nnorm == pnorm) return;  // blocked box step: no state entered
        if (static_cast<std::size_t>(nnorm) >= buckets_.size()) return;
        for (std::uint32_t idx : buckets_[static_cast<std::size_t>(nnorm)]) {
            const Compiled& c = compiled_[idx];
            CrossingTally& tl = tallies_[idx];
            switch (c.kind) {
                case Target::Kind::Shell:
                    ++tl.undirected;
                    pnorm < nnorm ? ++tl.up : ++tl.down;
                    break;
                case Target::Kind::State:
                    if (eq(next, c.coords)) {
                        ++tl.undirected;
                        pnorm < nnorm ? ++tl.up : ++tl.down;
                    }
                    break;
                case Target::Kind::XClass:
                    if (eq_abs(next, c.coords)) {
                        ++tl.undirected;
                        pnorm < nnorm ? ++tl.up : ++tl.down;
                    }
                    break;
                case Target::Kind::ADirected:
                    if (eq(next, c.coords)) {
                        if (pnorm < nnorm) {
                            if (contains(c.a_lower, prev)) { ++tl.undirected; ++tl.up; }
                        } else if (contains(c.a_upper, prev)) {
                            ++tl.undirected;
                            ++tl.down;
                        }
                    }
                    break;
            }
        }
    }

    // General-interface variant for callers holding LatticeVectors.
    void observe(const LatticeVector& prev, const LatticeVector& next) {
        observe_fast(to_i32(prev).data(), norm(prev), to_i32(next).data(), norm(next));
    }

    void finalize(bool censored) {
        censored_ = censored;
        finalized_ = true;
    }

    bool censored() const { return censored_; }
    bool finalized() const { return finalized_; }
    const std::vector<CrossingTally>& tallies() const { return tallies_; }

private:
    struct Compiled {
        Target::Kind kind;
        Coord tnorm = 0;
        std::vector<std::int32_t> coords;
        std::vector<std::vector<std::int32_t>> a_lower, a_upper;
    };

    void check_dim(const LatticeVector& v) const {
        if (static_cast<int>(v.size()) != d_)
            throw InvalidTargetError("target vector dimension mismatch: " + to_string(v));
    }

    static std::vector<std::int32_t> to_i32(const LatticeVector& v) {
        std::vector<std::int32_t> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<std::int32_t>(v[i]);
        return out;
    }

    inline bool eq(const std::int32_t* s, const std::vector<std::int32_t>& ref) const {
        for (int i = 0; i < d_; ++i)
            if (s[i] != ref[i]) return false;
        return true;
    }
    inline bool eq_abs(const std::int32_t* s, const std::vector<std::int32_t>& ref) const {
        for (int i = 0; i < d_; ++i) {
            std::int32_t a = s[i] < 0 ? -s[i] : s[i];
            if (a != ref[i]) return false;
        }
        return true;
    }
    inline bool contains(const std::vector<std::vector<std::int32_t>>& set,
                         const std::int32_t* s) const {
        for (const auto& m : set) {
            bool same = true;
            for (int i = 0; i < d_; ++i)
                if (m[i] != s[i]) { same = false; break; }
            if (same) return true;
        }
        return false;
    }

    std::vector<Target> targets_;
    int d_;
    std::vector<Compiled> compiled_;
    std::vector<std::vector<std::uint32_t>> buckets_;  // indexed by target norm
    std::vector<CrossingTally> tallies_;
    bool censored_ = false;
    bool finalized_ = false;
};

inline Tracker make_tracker(std::vector<Target> targets, int d) {
    return Tracker(std::move(targets), d);
}

inline const char* to_string(Target::Kind k) {
    switch (k) {
        case Target::Kind::State: return "state";
        case Target::Kind::Shell: return "shell";
        case Target::Kind::XClass: return "xclass";
        default: return "adirected";
    }
}

// Finalized tallies as JSON rows.
inline nlohmann::ordered_json tally_rows(const Tracker& t) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    const auto& targets = t.targets();
    const auto& tallies = t.tallies();
    for (std::size_t i = 0; i < targets.size(); ++i) {
        nlohmann::ordered_json r;
        r["target"] = targets[i].name();
        r["kind"] = to_string(targets[i].kind);
        r["up"] = tallies[i].up;
        r["down"] = tallies[i].down;
        r["undirected"] = tallies[i].undirected;
        r["censored"] = t.censored();
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace polya
