#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polya/common.hpp"

namespace polya {

// One ladder rung of one identity row.
struct LadderPoint {
    std::int64_t cutoff = 0;
    std::uint64_t n_returned = 0;
    double censored_frac = 0;
    double estimate = 0;
    double ci_low = 0, ci_high = 0;
    bool has_tv = false;
    double tv = 0;
    bool has_chi2 = false;
    double chi2_stat = 0;
    double chi2_p = 0;
};

struct IdentityReport {
    std::string identity;  // e.g. "shell_law"
    std::string target;    // e.g. "up[N(2)]"
    std::string verdict;   // pass | fail | flagged
    bool has_analytic = false;
    double analytic = 0;
    std::vector<LadderPoint> ladder;
    nlohmann::ordered_json detail;  // bins, CIs, candidate predictions, notes
};

struct VerificationReport {
    nlohmann::ordered_json config_echo;
    std::vector<IdentityReport> rows;

    bool any_fail() const {
        for (const auto& r : rows)
            if (r.verdict == "fail") return true;
        return false;
    }

    void write_csv(std::ostream& os) const {
        os << "identity,target,cutoff,n_returned,censored_frac,estimate,ci_low,ci_high,"
              "analytic,tv,chi2,verdict\n";
        for (const auto& r : rows) {
            for (const auto& p : r.ladder) {
                os << r.identity << ',' << r.target << ',' << p.cutoff << ',' << p.n_returned
                   << ',' << format_double(p.censored_frac) << ',' << format_double(p.estimate)
                   << ',' << format_double(p.ci_low) << ',' << format_double(p.ci_high) << ',';
                if (r.has_analytic) os << format_double(r.analytic);
                os << ',';
                if (p.has_tv) os << format_double(p.tv);
                os << ',';
                if (p.has_chi2) os << format_double(p.chi2_stat);
                os << ',' << r.verdict << '\n';
            }
        }
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["config"] = config_echo;
        j["identities"] = nlohmann::ordered_json::array();
        for (const auto& r : rows) {
            nlohmann::ordered_json row;
            row["identity"] = r.identity;
            row["target"] = r.target;
            row["verdict"] = r.verdict;
            if (r.has_analytic) row["analytic"] = r.analytic;
            row["ladder"] = nlohmann::ordered_json::array();
            for (const auto& p : r.ladder) {
                nlohmann::ordered_json q;
                q["cutoff"] = p.cutoff;
                q["n_returned"] = p.n_returned;
                q["censored_frac"] = p.censored_frac;
                q["estimate"] = p.estimate;
                q["ci_low"] = p.ci_low;
                q["ci_high"] = p.ci_high;
                if (p.has_tv) q["tv"] = p.tv;
                if (p.has_chi2) {
                    q["chi2_stat"] = p.chi2_stat;
                    q["chi2_p"] = p.chi2_p;
                }
                row["ladder"].push_back(std::move(q));
            }
            if (!r.detail.is_null()) row["detail"] = r.detail;
            j["identities"].push_back(std::move(row));
        }
        return j;
    }
};

}  // namespace polya
