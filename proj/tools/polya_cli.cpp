// polya: analytic laws, walk simulation, and the verification suite for
// state- and set-crossing counts of origin excursions on Z^d.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "polya/adjudicate.hpp"
#include "polya/analytic.hpp"
#include "polya/harness.hpp"
#include "polya/lattice.hpp"
#include "polya/oracle.hpp"
#include "polya/shells.hpp"

using namespace polya;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;

LatticeVector parse_vector(const std::string& s) {
    LatticeVector v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        v.push_back(std::stoll(item));
    if (v.empty()) throw CLI::ValidationError("vector flag must be a,b,c integers");
    return v;
}

Direction parse_direction(const std::string& s) {
    if (s == "up") return Direction::Up;
    if (s == "down") return Direction::Down;
    if (s == "total") return Direction::Total;
    throw CLI::ValidationError("direction must be up|down|total");
}

WalkKind parse_walk(const std::string& s) {
    if (s == "free") return WalkKind::free();
    if (s == "reflected") return WalkKind::reflected();
    if (s.rfind("box:", 0) == 0) return WalkKind::box(std::stoll(s.substr(4)));
    if (s.rfind("reflected-box:", 0) == 0)
        return WalkKind::reflected_box(std::stoll(s.substr(14)));
    throw CLI::ValidationError("walk must be free|reflected|box:N|reflected-box:N");
}

// "state:1,1" | "shell:2" | "xclass:1,1" | "adirected:1,0|A=1,1;0,1"
Target parse_target(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw CLI::ValidationError("malformed target: " + s);
    std::string kind = s.substr(0, colon), rest = s.substr(colon + 1);
    if (kind == "shell") return Target::shell(std::stoll(rest));
    if (kind == "state") return Target::state(parse_vector(rest));
    if (kind == "xclass") return Target::xclass(parse_vector(rest));
    if (kind == "adirected") {
        auto bar = rest.find("|A=");
        if (bar == std::string::npos)
            throw CLI::ValidationError("adirected target needs |A=...: " + s);
        LatticeVector v = parse_vector(rest.substr(0, bar));
        std::vector<LatticeVector> a;
        std::stringstream ss(rest.substr(bar + 3));
        std::string item;
        while (std::getline(ss, item, ';')) a.push_back(parse_vector(item));
        return Target::a_directed(std::move(v), std::move(a));
    }
    throw CLI::ValidationError("unknown target kind: " + kind);
}

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + tmp + " for writing");
        os << content;
    }
    std::filesystem::rename(tmp, path);
}

void emit(const std::string& content, const std::string& out) {
    if (out.empty())
        std::cout << content;
    else
        atomic_write(out, content);
}

std::string pmf_csv(const Pmf& p) {
    std::string s = "k,mass\n";
    for (std::size_t k = 0; k < p.masses.size(); ++k)
        s += std::to_string(k) + "," + format_double(p.masses[k]) + "\n";
    s += "tail," + format_double(p.tail) + "\n";
    return s;
}

// pure rendering of an emitted pmf table
std::string pmf_svg(const Pmf& p, const std::string& title) {
    std::size_t n = std::min<std::size_t>(p.masses.size(), 64);
    double peak = 1e-12;
    for (std::size_t k = 0; k < n; ++k) peak = std::max(peak, p.masses[k]);
    const int W = 640, H = 360, mL = 42, mB = 28, mT = 28;
    double bw = static_cast<double>(W - mL - 8) / static_cast<double>(n);
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W) +
                    "\" height=\"" + std::to_string(H) + "\">\n";
    s += "<text x=\"8\" y=\"18\" font-size=\"13\">" + title + "</text>\n";
    for (std::size_t k = 0; k < n; ++k) {
        double h = p.masses[k] / peak * (H - mB - mT);
        double x = mL + bw * static_cast<double>(k);
        s += "<rect x=\"" + format_double(x) + "\" y=\"" + format_double(H - mB - h) +
             "\" width=\"" + format_double(bw * 0.9) + "\" height=\"" + format_double(h) +
             "\" fill=\"#4477aa\"/>\n";
    }
    s += "<line x1=\"" + std::to_string(mL) + "\" y1=\"" + std::to_string(H - mB) + "\" x2=\"" +
         std::to_string(W - 8) + "\" y2=\"" + std::to_string(H - mB) + "\" stroke=\"#000\"/>\n";
    s += "<text x=\"" + std::to_string(mL) + "\" y=\"" + std::to_string(H - 8) +
         "\" font-size=\"11\">k = 0.." + std::to_string(n - 1) + ", peak mass " +
         format_double(peak) + "</text>\n</svg>\n";
    return s;
}

void warn_truncation(const Pmf& p) {
    if (p.truncation_warning())
        std::cerr << "TruncationWarning: tail mass " << format_double(p.tail)
                  << " exceeds 1e-6; raise --kmax\n";
}

// ---- verify config ----------------------------------------------------

[[noreturn]] void config_fail(const std::string& pointer, const std::string& what) {
    throw ConfigError(pointer, what);
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& pointer) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) config_fail(pointer + "/" + it.key(), "unknown key");
}

LatticeVector json_vector(const json& j, const std::string& pointer) {
    if (!j.is_array() || j.empty()) config_fail(pointer, "expected a nonempty integer array");
    LatticeVector v;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number_integer())
            config_fail(pointer + "/" + std::to_string(i), "expected an integer");
        v.push_back(j[i].get<Coord>());
    }
    return v;
}

struct VerifyPlan {
    ExperimentConfig experiment;
    std::vector<IdentitySpec> identities;
};

VerifyPlan parse_verify_config(const json& cfg) {
    if (!cfg.is_object()) config_fail("", "config root must be an object");
    require_keys(cfg,
                 {"dimension", "walk", "cutoff_ladder", "excursions_per_cutoff", "seed",
                  "workers", "identities", "tolerances"},
                 "");
    VerifyPlan plan;
    ExperimentConfig& ex = plan.experiment;
    if (!cfg.contains("dimension") || !cfg["dimension"].is_number_integer())
        config_fail("/dimension", "required integer");
    ex.dimension = cfg["dimension"].get<int>();
    if (!cfg.contains("walk") || !cfg["walk"].is_string())
        config_fail("/walk", "required string free|reflected|box:N|reflected-box:N");
    try {
        ex.walk = parse_walk(cfg["walk"].get<std::string>());
    } catch (const std::exception& e) {
        config_fail("/walk", e.what());
    }
    if (!cfg.contains("cutoff_ladder") || !cfg["cutoff_ladder"].is_array())
        config_fail("/cutoff_ladder", "required integer array");
    for (std::size_t i = 0; i < cfg["cutoff_ladder"].size(); ++i) {
        if (!cfg["cutoff_ladder"][i].is_number_integer())
            config_fail("/cutoff_ladder/" + std::to_string(i), "expected an integer");
        ex.cutoff_ladder.push_back(cfg["cutoff_ladder"][i].get<std::int64_t>());
    }
    if (!cfg.contains("excursions_per_cutoff") ||
        !cfg["excursions_per_cutoff"].is_number_integer())
        config_fail("/excursions_per_cutoff", "required integer >= 1000");
    ex.excursions_per_cutoff = cfg["excursions_per_cutoff"].get<std::uint64_t>();
    if (cfg.contains("seed")) {
        if (!cfg["seed"].is_number_integer()) config_fail("/seed", "expected an integer");
        ex.seed = cfg["seed"].get<std::uint64_t>();
    }
    if (cfg.contains("workers")) {
        if (!cfg["workers"].is_number_integer()) config_fail("/workers", "expected an integer");
        ex.workers = cfg["workers"].get<int>();
    }
    double def_tv = 0.05, def_rel = 0.10;
    if (cfg.contains("tolerances")) {
        if (!cfg["tolerances"].is_object()) config_fail("/tolerances", "expected an object");
        require_keys(cfg["tolerances"], {"tv", "rel"}, "/tolerances");
        if (cfg["tolerances"].contains("tv")) def_tv = cfg["tolerances"]["tv"].get<double>();
        if (cfg["tolerances"].contains("rel")) def_rel = cfg["tolerances"]["rel"].get<double>();
    }
    if (!cfg.contains("identities") || !cfg["identities"].is_array() || cfg["identities"].empty())
        config_fail("/identities", "required nonempty array");

    std::set<std::string> target_names;
    auto add_target = [&](Target t) {
        if (target_names.insert(t.name()).second) ex.targets.push_back(std::move(t));
    };
    Coord max_shell = -1;

    for (std::size_t i = 0; i < cfg["identities"].size(); ++i) {
        const json& id = cfg["identities"][i];
        std::string ptr = "/identities/" + std::to_string(i);
        if (!id.is_object() || !id.contains("kind") || !id["kind"].is_string())
            config_fail(ptr, "identity needs a string kind");
        std::string kind = id["kind"].get<std::string>();
        IdentitySpec spec;
        spec.tol_tv = def_tv;
        spec.tol_rel = def_rel;
        auto opt_num = [&](const char* key, double& slot) {
            if (id.contains(key)) slot = id[key].get<double>();
        };
        if (kind == "shell_law") {
            require_keys(id, {"kind", "n", "direction", "kmax", "tol_tv"}, ptr);
            spec.kind = IdentityKind::ShellLaw;
            if (!id.contains("n")) config_fail(ptr + "/n", "required shell level");
            spec.level = id["n"].get<std::int64_t>();
            if (id.contains("direction"))
                spec.dir = parse_direction(id["direction"].get<std::string>());
            if (id.contains("kmax")) spec.kmax = id["kmax"].get<std::size_t>();
            opt_num("tol_tv", spec.tol_tv);
            add_target(Target::shell(spec.level));
            max_shell = std::max(max_shell, spec.level);
        } else if (kind == "state_expectation") {
            require_keys(id, {"kind", "v", "direction", "tol_rel"}, ptr);
            spec.kind = IdentityKind::StateExpectation;
            spec.v = json_vector(id.contains("v") ? id["v"] : json(), ptr + "/v");
            if (id.contains("direction"))
                spec.dir = parse_direction(id["direction"].get<std::string>());
            opt_num("tol_rel", spec.tol_rel);
            add_target(Target::state(spec.v));
        } else if (kind == "d1_level_law") {
            require_keys(id, {"kind", "level", "direction", "kmax", "tol_tv"}, ptr);
            spec.kind = IdentityKind::D1LevelLaw;
            if (!id.contains("level")) config_fail(ptr + "/level", "required level");
            spec.level = id["level"].get<std::int64_t>();
            if (id.contains("direction"))
                spec.dir = parse_direction(id["direction"].get<std::string>());
            if (id.contains("kmax")) spec.kmax = id["kmax"].get<std::size_t>();
            opt_num("tol_tv", spec.tol_tv);
            add_target(Target::state({spec.level}));
        } else if (kind == "thinning") {
            require_keys(id, {"kind", "v", "a", "tol_tv"}, ptr);
            spec.kind = IdentityKind::Thinning;
            spec.v = json_vector(id.contains("v") ? id["v"] : json(), ptr + "/v");
            if (!id.contains("a") || !id["a"].is_array() || id["a"].empty())
                config_fail(ptr + "/a", "required nonempty array of vectors");
            for (std::size_t k = 0; k < id["a"].size(); ++k)
                spec.a_set.push_back(
                    json_vector(id["a"][k], ptr + "/a/" + std::to_string(k)));
            opt_num("tol_tv", spec.tol_tv);
            add_target(Target::state(spec.v));
            add_target(Target::a_directed(spec.v, spec.a_set));
        } else if (kind == "kernel_conditional") {
            require_keys(id, {"kind", "v", "direction", "family", "m"}, ptr);
            spec.kind = IdentityKind::KernelConditional;
            spec.v = json_vector(id.contains("v") ? id["v"] : json(), ptr + "/v");
            spec.dir = Direction::Up;
            if (id.contains("direction"))
                spec.dir = parse_direction(id["direction"].get<std::string>());
            spec.family = KernelFamily::State;
            if (id.contains("family")) {
                std::string f = id["family"].get<std::string>();
                if (f == "xclass") spec.family = KernelFamily::XClass;
                else if (f != "state") config_fail(ptr + "/family", "must be state|xclass");
            }
            if (id.contains("m")) spec.condition_m = id["m"].get<int>();
            plan.experiment.studies.push_back({spec.v, spec.dir, spec.family});
        } else if (kind == "bd_chain") {
            require_keys(id, {"kind", "lambda", "mu", "levels", "runs", "tmax", "tol_tv"}, ptr);
            spec.kind = IdentityKind::BdChain;
            opt_num("lambda", spec.bd_lambda);
            opt_num("mu", spec.bd_mu);
            if (id.contains("levels")) spec.bd_levels = id["levels"].get<int>();
            if (id.contains("runs")) spec.bd_runs = id["runs"].get<std::uint64_t>();
            if (id.contains("tmax")) spec.bd_tmax = id["tmax"].get<std::int64_t>();
            opt_num("tol_tv", spec.tol_tv);
        } else if (kind == "return_fraction") {
            require_keys(id, {"kind", "lo", "hi"}, ptr);
            spec.kind = IdentityKind::ReturnFraction;
            if (!id.contains("lo") || !id.contains("hi"))
                config_fail(ptr, "return_fraction needs lo and hi");
            spec.frac_lo = id["lo"].get<double>();
            spec.frac_hi = id["hi"].get<double>();
        } else {
            config_fail(ptr + "/kind", "unknown identity kind: " + kind);
        }
        plan.identities.push_back(std::move(spec));
    }
    // track the shell ladder around requested shells so the per-path flow
    // audit has consecutive pairs to check
    if (max_shell >= 0)
        for (Coord n = 0; n <= max_shell + 1; ++n) add_target(Target::shell(n));
    return plan;
}

// ---- subcommands -------------------------------------------------------

int cmd_shells(int d, Coord n, bool nonneg, const std::string& format) {
    BigInt size = shell_size(d, n, nonneg);
    ordered_json j;
    j["d"] = d;
    j["n"] = n;
    j["orthant"] = nonneg ? "nonnegative" : "full";
    j["size"] = size.str();
    if (n >= 1) {
        auto sc = shell_combinatorics(d, n);
        j["C"] = sc.c.str();
        j["C0"] = sc.c0.str();
        j["p_up"] = to_string(sc.p_up);
    }
    if (format == "json") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "d,n,orthant,size,C,C0,p_up\n"
                  << d << ',' << n << ',' << (nonneg ? "nonneg" : "full") << ',' << size.str()
                  << ',' << (n >= 1 ? shell_c(d, n).str() : "") << ','
                  << (n >= 1 ? shell_c0(d, n).str() : "") << ','
                  << (n >= 1 ? to_string(shell_combinatorics(d, n).p_up) : "") << "\n";
    }
    return kExitOk;
}

struct AnalyticArgs {
    std::string kind, v_flag, direction = "total", family = "state", format = "csv";
    std::string out, chart, in_pmf, convention = "destination";
    int d = 1;
    std::int64_t n = 1;
    std::size_t kmax = 200;
    int m = 0;
    double z = -1;
};

int cmd_analytic(const AnalyticArgs& a) {
    Direction dir = parse_direction(a.direction);
    IndexConvention conv = a.convention == "source" ? IndexConvention::SourceLevel
                                                    : IndexConvention::DestinationLevel;
    std::optional<Pmf> pmf;
    std::string title;

    if (a.kind == "expect") {
        LatticeVector v = parse_vector(a.v_flag);
        auto e = expected_crossings(v);
        ordered_json j;
        j["v"] = to_string(v);
        j["up"] = to_string(e.up);
        j["down"] = to_string(e.down);
        j["total"] = to_string(e.total);
        j["up_xclass"] = to_string(e.up_xclass);
        j["down_xclass"] = to_string(e.down_xclass);
        j["total_xclass"] = to_string(e.total_xclass);
        std::string content;
        if (a.format == "json") {
            content = j.dump(2) + "\n";
        } else {
            content = "v,up,down,total,up_xclass,down_xclass,total_xclass\n\"" + to_string(v) +
                      "\"," + to_string(e.up) + "," + to_string(e.down) + "," +
                      to_string(e.total) + "," + to_string(e.up_xclass) + "," +
                      to_string(e.down_xclass) + "," + to_string(e.total_xclass) + "\n";
        }
        emit(content, a.out);
        return kExitOk;
    }

    if (a.kind == "shell") {
        pmf = shell_law(a.d, static_cast<int>(a.n), dir, a.kmax, conv);
        title = pmf->label;
    } else if (a.kind == "d1") {
        pmf = d1_crossing_law(a.n, dir, a.kmax);
        title = pmf->label;
    } else if (a.kind == "state-kernel") {
        LatticeVector v = parse_vector(a.v_flag);
        KernelFamily fam = a.family == "xclass" ? KernelFamily::XClass : KernelFamily::State;
        StateKernel k = state_kernel(v, dir, fam);
        pmf = conditional_count_pmf(k, std::max(1, a.m), a.kmax);
        title = "kernel " + Target::state(v).name() + " m=" + std::to_string(std::max(1, a.m));
        pmf->label = title;
    } else if (a.kind == "thin") {
        if (a.z < 0) throw CLI::ValidationError("--z required for --kind thin");
        Pmf base;
        if (!a.in_pmf.empty()) {
            std::ifstream is(a.in_pmf);
            if (!is) throw CLI::ValidationError("cannot read " + a.in_pmf);
            base = pmf_from_json(json::parse(is));
        } else {
            base = d1_crossing_law(a.n, dir, a.kmax);
        }
        pmf = thin_pmf(base, a.z);
        pmf->label = "thin(" + base.label + ", z=" + format_double(a.z) + ")";
        title = pmf->label;
    } else {
        throw CLI::ValidationError("--kind must be shell|state-kernel|d1|expect|thin");
    }

    warn_truncation(*pmf);
    std::string content =
        a.format == "json" ? to_json(*pmf).dump(2) + "\n" : pmf_csv(*pmf);
    emit(content, a.out);
    if (!a.chart.empty()) atomic_write(a.chart, pmf_svg(*pmf, title));
    return kExitOk;
}

struct SimulateArgs {
    int d = 2;
    std::string walk = "free";
    std::int64_t tmax = 100000;
    std::uint64_t excursions = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::vector<std::string> track;
    std::string out, format = "csv";
};

int cmd_simulate(const SimulateArgs& a) {
    ExperimentConfig cfg;
    cfg.dimension = a.d;
    cfg.walk = parse_walk(a.walk);
    cfg.cutoff_ladder = {a.tmax};
    cfg.excursions_per_cutoff = a.excursions;
    cfg.seed = a.seed;
    cfg.workers = a.workers;
    if (a.track.empty()) throw CLI::ValidationError("at least one --track target required");
    for (const auto& t : a.track) cfg.targets.push_back(parse_target(t));

    McResults mc = run_mc(cfg);

    std::string content;
    if (a.format == "json") {
        ordered_json j;
        j["dimension"] = a.d;
        j["walk"] = cfg.walk.name();
        j["t_max"] = a.tmax;
        j["excursions"] = a.excursions;
        j["seed"] = a.seed;
        j["n_returned"] = mc.rung_returned[0];
        j["censored"] = mc.rung_censored[0];
        j["targets"] = ordered_json::array();
        for (std::size_t t = 0; t < mc.config.targets.size(); ++t) {
            for (Direction dd : {Direction::Up, Direction::Down, Direction::Total}) {
                const EmpiricalDist& e = mc.dist(t, 0, dd);
                ordered_json row;
                row["target"] = mc.config.targets[t].name();
                row["direction"] = to_string(dd);
                row["counts"] = e.counts;
                j["targets"].push_back(std::move(row));
            }
        }
        content = j.dump(2) + "\n";
    } else {
        content = "target,direction,k,count,freq,n_returned,censored\n";
        for (std::size_t t = 0; t < mc.config.targets.size(); ++t) {
            for (Direction dd : {Direction::Up, Direction::Down, Direction::Total}) {
                const EmpiricalDist& e = mc.dist(t, 0, dd);
                for (std::size_t k = 0; k < e.counts.size(); ++k) {
                    if (e.counts[k] == 0 && k > 0) continue;
                    content += "\"" + mc.config.targets[t].name() + "\"," + to_string(dd) + "," +
                               std::to_string(k) + "," + std::to_string(e.counts[k]) + "," +
                               format_double(e.n_returned
                                                 ? static_cast<double>(e.counts[k]) /
                                                       static_cast<double>(e.n_returned)
                                                 : 0.0) +
                               "," + std::to_string(e.n_returned) + "," +
                               std::to_string(mc.rung_censored[0]) + "\n";
                }
            }
        }
    }
    emit(content, a.out);
    return kExitOk;
}

int cmd_verify(const std::string& config_path, const std::string& out_prefix) {
    json cfg;
    {
        std::ifstream is(config_path);
        if (!is) {
            std::cerr << "error: cannot read config " << config_path << "\n";
            return kExitUsage;
        }
        try {
            cfg = json::parse(is);
        } catch (const json::parse_error& e) {
            std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
            return kExitUsage;
        }
    }
    VerifyPlan plan;
    try {
        plan = parse_verify_config(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error at " << (e.pointer.empty() ? "/" : e.pointer) << ": "
                  << e.what() << "\n";
        return kExitUsage;
    }
    McResults mc = run_mc(plan.experiment);
    VerificationReport rep = adjudicate(mc, plan.identities);

    std::ostringstream csv;
    rep.write_csv(csv);
    atomic_write(out_prefix + ".csv", csv.str());
    atomic_write(out_prefix + ".json", rep.to_json().dump(2) + "\n");

    int fails = 0;
    for (const auto& r : rep.rows) {
        std::cout << r.identity << " [" << r.target << "] -> " << r.verdict << "\n";
        if (r.verdict == "fail") ++fails;
    }
    std::cout << "report written to " << out_prefix << ".csv / .json\n";
    return fails ? kExitVerifyFail : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crossing laws of origin excursions for the symmetric nearest-neighbor walk"};
    app.require_subcommand(1);

    // shells
    auto* shells = app.add_subcommand("shells", "shell sizes and transition combinatorics");
    int sh_d = 1;
    std::int64_t sh_n = 1;
    bool sh_nonneg = false;
    std::string sh_format = "csv";
    shells->add_option("--d", sh_d, "dimension")->required()->check(CLI::PositiveNumber);
    shells->add_option("--n", sh_n, "norm level")->required()->check(CLI::NonNegativeNumber);
    shells->add_flag("--nonneg", sh_nonneg, "restrict to the nonnegative orthant");
    shells->add_option("--format", sh_format)->check(CLI::IsMember({"csv", "json"}));

    // analytic
    auto* analytic = app.add_subcommand("analytic", "closed-form crossing laws and expectations");
    AnalyticArgs aa;
    analytic->add_option("--kind", aa.kind, "shell|state-kernel|d1|expect|thin")->required();
    analytic->add_option("--d", aa.d, "dimension");
    analytic->add_option("--v", aa.v_flag, "state vector a,b,c");
    analytic->add_option("--n", aa.n, "shell level / d1 level");
    analytic->add_option("--direction", aa.direction)
        ->check(CLI::IsMember({"up", "down", "total"}));
    analytic->add_option("--family", aa.family)->check(CLI::IsMember({"state", "xclass"}));
    analytic->add_option("--kmax", aa.kmax, "pmf cutoff");
    analytic->add_option("--m", aa.m, "parent-sum conditioning value");
    analytic->add_option("--z", aa.z, "thinning probability");
    analytic->add_option("--in", aa.in_pmf, "pmf JSON file to thin");
    analytic->add_option("--convention", aa.convention)
        ->check(CLI::IsMember({"destination", "source"}));
    analytic->add_option("--format", aa.format)->check(CLI::IsMember({"csv", "json"}));
    analytic->add_option("--out", aa.out, "write output to file (atomic)");
    analytic->add_option("--chart", aa.chart, "write an SVG rendering of the table");

    // simulate
    auto* sim = app.add_subcommand("simulate", "seeded excursion sampling with crossing tallies");
    SimulateArgs sa;
    sim->add_option("--d", sa.d, "dimension")->required();
    sim->add_option("--walk", sa.walk, "free|reflected|box:N|reflected-box:N");
    sim->add_option("--tmax", sa.tmax, "censoring cutoff")->required();
    sim->add_option("--excursions", sa.excursions, "excursion quota")->required();
    sim->add_option("--seed", sa.seed, "rng seed");
    sim->add_option("--workers", sa.workers, "worker threads");
    sim->add_option("--track", sa.track, "target spec (repeatable)")->required();
    sim->add_option("--out", sa.out, "output file (atomic write)");
    sim->add_option("--format", sa.format)->check(CLI::IsMember({"csv", "json"}));

    // verify
    auto* verify = app.add_subcommand("verify", "run the identity verification suite");
    std::string vf_config, vf_out = "report";
    verify->add_option("--config", vf_config, "verify config JSON")->required();
    verify->add_option("--out", vf_out, "output prefix for report files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (shells->parsed()) return cmd_shells(sh_d, sh_n, sh_nonneg, sh_format);
        if (analytic->parsed()) return cmd_analytic(aa);
        if (sim->parsed()) return cmd_simulate(sa);
        if (verify->parsed()) return cmd_verify(vf_config, vf_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
