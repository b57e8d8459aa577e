#include "driftpac/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace driftpac {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view key, std::string_view v) {
    const std::string s(v);
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(d))
        throw std::invalid_argument("config key '" + std::string(key) + "': not a finite number: '" + s + "'");
    return d;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
    Int out{};
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw std::invalid_argument("config key '" + std::string(key) + "': not an integer: '" + std::string(v) + "'");
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config key '" + std::string(key) + "': expected true/false");
}

struct Field {
    ConfigKey key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define DP_DOUBLE(name, member, help)                                                              \
    Field {                                                                                       \
        {name, help}, [](RunConfig& c, std::string_view v) { c.member = parse_double(name, v); }, \
            [](const RunConfig& c) { return fmt_double(c.member); }                               \
    }
#define DP_INT(name, member, type, help)                                                              \
    Field {                                                                                          \
        {name, help}, [](RunConfig& c, std::string_view v) { c.member = parse_int<type>(name, v); }, \
            [](const RunConfig& c) { return std::to_string(c.member); }                              \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        DP_DOUBLE("epsilon", bound.epsilon, "accuracy epsilon in (0,1)"),
        DP_DOUBLE("delta", bound.delta, "confidence parameter delta in (0,1)"),
        DP_DOUBLE("mu_min", bound.mu_min, "lower bound on the target change"),
        DP_DOUBLE("mu_max", bound.mu_max, "upper bound on the target change, < 1/4"),
        DP_INT("vc_dim", bound.vc_dim, int, "VC dimension of the hypothesis class"),
        DP_DOUBLE("l_min", aeb.l_min, "smallest distance to the obstacle [m]"),
        DP_DOUBLE("l_max", aeb.l_max, "largest distance to the obstacle [m]"),
        DP_DOUBLE("v2_mean", aeb.v2_mean, "mean of v^2 [m^2/s^2] (or v_mean_kmh)"),
        DP_DOUBLE("v2_std", aeb.v2_std, "standard deviation of v^2 [m^2/s^2] (or v_std_kmh)"),
        DP_DOUBLE("v2_cap_sd", aeb.v2_cap_sd, "v^2 draws above mean + cap*std are redrawn"),
        DP_DOUBLE("mass0", aeb.mass0, "initial vehicle mass [kg]"),
        DP_DOUBLE("force0", aeb.force0, "initial braking force [N]"),
        DP_DOUBLE("omega_f_mean", aeb.omega_f_mean, "mean of the force drift factor"),
        DP_DOUBLE("omega_f_std", aeb.omega_f_std, "std of the force drift factor"),
        DP_DOUBLE("omega_m_mean", aeb.omega_m_mean, "mean of the mass factor"),
        DP_DOUBLE("omega_m_std", aeb.omega_m_std, "std of the mass factor"),
        Field{{"mass_drift", "independent | compound"},
              [](RunConfig& c, std::string_view v) { c.aeb.mass_drift = aeb::mass_drift_from_string(std::string(v)); },
              [](const RunConfig& c) { return aeb::to_string(c.aeb.mass_drift); }},
        DP_INT("m", m, std::int64_t, "training samples; 0 uses the m0 bound"),
        DP_INT("facets", facets, std::size_t, "hypothesis facets: 4 (rotated rectangle) or 1"),
        DP_DOUBLE("rho", rho, "strict-inequality tolerance"),
        Field{{"solver", "auto | bnb | offset"},
              [](RunConfig& c, std::string_view v) { c.solver = solver_kind_from_string(std::string(v)); },
              [](const RunConfig& c) { return to_string(c.solver); }},
        Field{{"tie_break", "run the volume tie-break stage"},
              [](RunConfig& c, std::string_view v) { c.tie_break = parse_bool("tie_break", v); },
              [](const RunConfig& c) { return std::string(c.tie_break ? "true" : "false"); }},
        DP_DOUBLE("time_limit", time_limit_s, "solver time limit [s]"),
        DP_INT("node_limit", node_limit, std::int64_t, "solver node limit"),
        DP_DOUBLE("gap", gap, "relative gap at which the solver stops"),
        DP_DOUBLE("feas_tol", feas_tol, "feasibility tolerance"),
        DP_DOUBLE("int_tol", int_tol, "integrality tolerance"),
        DP_INT("runs", runs, std::int64_t, "validation runs"),
        DP_INT("samples_per_run", samples_per_run, std::int64_t, "validation samples per run"),
        DP_INT("bins", bins, int, "histogram bins"),
        DP_DOUBLE("exceed_limit", exceed_limit, "allowed fraction of runs above the bound"),
        DP_INT("threads", threads, unsigned, "validation worker threads"),
        DP_INT("mu_mc", mu_mc, std::int64_t, "draws per step for the measured target change; 0 skips"),
        DP_INT("seed", seed, std::uint64_t, "master seed"),
        Field{{"out_root", "root directory for run directories"},
              [](RunConfig& c, std::string_view v) { c.out_root = std::string(v); },
              [](const RunConfig& c) { return c.out_root; }},
    };
    return f;
}

#undef DP_DOUBLE
#undef DP_INT

}  // namespace

void RunConfig::validate() const {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw std::invalid_argument("config: " + what);
    };
    try {
        bound.validate();
        aeb.validate();
    } catch (const std::domain_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    need(m >= 0, "m must be >= 0");
    if (m == 0) {
        need(bound.mu_min > 0.0, "m = 0 derives m from the bound, which needs mu_min > 0");
        need(bound.mu_max < 0.25, "mu_max must satisfy mu_max < 1/4");
    }
    need(facets == 1 || facets == 4, "facets must be 1 or 4");
    need(rho >= 0.0, "rho must be >= 0");
    need(time_limit_s > 0.0, "time_limit must be > 0");
    need(node_limit >= 1, "node_limit must be >= 1");
    need(gap >= 0.0, "gap must be >= 0");
    need(feas_tol > 0.0 && int_tol > 0.0 && int_tol < 0.5, "tolerances must be positive (int_tol < 0.5)");
    need(runs >= 1 && samples_per_run >= 1, "runs and samples_per_run must be >= 1");
    need(bins >= 1, "bins must be >= 1");
    need(exceed_limit >= 0.0 && exceed_limit <= 1.0, "exceed_limit must lie in [0,1]");
    need(threads >= 1, "threads must be >= 1");
    need(mu_mc >= 0, "mu_mc must be >= 0");
}

FitOptions RunConfig::fit_options() const {
    FitOptions o;
    o.solver = solver;
    o.tie_break = tie_break;
    o.limits.time_limit_s = time_limit_s;
    o.limits.node_limit = node_limit;
    o.limits.gap = gap;
    o.limits.feas_tol = feas_tol;
    o.limits.int_tol = int_tol;
    return o;
}

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> k;
        for (const auto& f : fields()) k.push_back(f.key);
        k.push_back({"v_mean_kmh", "mean speed [km/h]; sets v2_mean to its square in SI"});
        k.push_back({"v_std_kmh", "speed spread [km/h]; sets v2_std to its square in SI"});
        return k;
    }();
    return keys;
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
    if (key == "v_mean_kmh") {
        cfg.aeb.v2_mean = aeb::kmh2_to_si(parse_double(key, value));
        return;
    }
    if (key == "v_std_kmh") {
        cfg.aeb.v2_std = aeb::kmh2_to_si(parse_double(key, value));
        return;
    }
    for (const auto& f : fields()) {
        if (f.key.name == key) {
            f.set(cfg, value);
            return;
        }
    }
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    std::vector<std::string> seen;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        const std::string canonical = key == "v_mean_kmh" ? "v2_mean" : key == "v_std_kmh" ? "v2_std" : key;
        for (const auto& s : seen)
            if (s == canonical)
                throw std::invalid_argument("config line " + std::to_string(lineno) + ": '" + key + "' set twice");
        seen.push_back(canonical);
        try {
            set_config_value(cfg, key, value);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    for (const auto& f : fields()) os << f.key.name << " = " << f.get(cfg) << '\n';
    return os.str();
}

nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& f : fields()) {
        const std::string v = f.get(cfg);
        auto parsed = nlohmann::json::parse(v, nullptr, false);
        j[f.key.name] = parsed.is_number() || parsed.is_boolean() ? parsed : nlohmann::json(v);
    }
    return j;
}

}  // namespace driftpac
