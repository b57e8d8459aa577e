#include "driftpac/pipeline.hpp"

#include "driftpac/bounds.hpp"
#include "driftpac/drift_sim.hpp"
#include "driftpac/fit.hpp"
#include "driftpac/lp_format.hpp"
#include "driftpac/preprocess.hpp"
#include "driftpac/validate.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

namespace driftpac {

namespace fs = std::filesystem;

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path default_run_dir(const RunConfig& cfg) {
    fs::path root = "runs";
    if (!cfg.out_root.empty())
        root = cfg.out_root;
    else if (const char* env = std::getenv("DRIFTPAC_RUNS"); env && *env)
        root = env;
    std::string stamp = utc_timestamp();
    for (auto& c : stamp)
        if (c == ':') c = '-';
    return root / (stamp + "-" + std::to_string(cfg.seed));
}

namespace {

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json bound_json(const RunConfig& cfg, const bounds::M0Result* r, std::int64_t m) {
    nlohmann::json j;
    j["epsilon"] = cfg.bound.epsilon;
    j["delta"] = cfg.bound.delta;
    j["mu_min"] = cfg.bound.mu_min;
    j["mu_max"] = cfg.bound.mu_max;
    j["vc_dim"] = cfg.bound.vc_dim;
    if (r) {
        j["mu_min_term"] = r->mu_min_term;
        j["mu_max_term"] = r->mu_max_term;
        j["raw"] = r->raw;
        j["m0"] = r->m0;
        j["dominant_term"] = bounds::to_string(r->dominant);
    } else {
        j["m0"] = nullptr;
    }
    j["m"] = m;
    j["m_source"] = cfg.m == 0 ? "bound" : "config";
    j["bound_value"] = 4.0 * cfg.bound.mu_max + cfg.bound.epsilon;
    return j;
}

class Stages {
  public:
    Stages(RunManifest& man) : man_(man) {}

    template <typename F>
    void run(const std::string& name, int fail_code, F&& body) {
        StageRecord rec;
        rec.name = name;
        rec.started = utc_timestamp();
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body(rec.artifacts);
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            flush_partial(rec);
            throw StageError(name, e.what(), fail_code);
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rec.finished = utc_timestamp();
        man_.stages.push_back(std::move(rec));
        write_manifest();
    }

    void write_manifest() const { write_text(man_.dir / "manifest.json", dump(to_json(man_))); }

  private:
    void flush_partial(StageRecord rec) {
        rec.finished = utc_timestamp();
        man_.summary["failed_stage"] = rec.name;
        try {
            write_manifest();
        } catch (...) {
        }
    }

    RunManifest& man_;
};

}  // namespace

RunManifest run_pipeline(const RunConfig& cfg, const fs::path& dir) {
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw StageError("config", e.what(), kExitUsage);
    }
    RunManifest man;
    man.dir = dir;
    man.config_text = serialize_config(cfg);
    man.started = utc_timestamp();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw StageError("setup", "cannot create " + dir.string() + ": " + ec.message(), kExitUsage);
    write_text(dir / "config.txt", man.config_text);
    man.summary = nlohmann::json::object();
    Stages st(man);

    std::int64_t m = cfg.m;
    st.run("bound", kExitUsage, [&](auto& files) {
        std::optional<bounds::M0Result> r;
        if (cfg.bound.mu_min > 0.0 && cfg.bound.mu_max < 0.25) r = bounds::m0(cfg.bound);
        else if (cfg.m == 0) throw std::domain_error("m0 needs 0 < mu_min and mu_max < 1/4");
        if (m == 0) m = r->m0;
        write_text(dir / "bound.json", dump(bound_json(cfg, r ? &*r : nullptr, m)));
        files.push_back("bound.json");
        man.summary["m"] = m;
        if (r) man.summary["m0"] = r->m0;
    });

    aeb::AebParams params = cfg.aeb;
    params.seed = cfg.seed;
    aeb::DriftTrace trace;
    st.run("simulate", kExitNumerical, [&](auto& files) {
        trace = aeb::generate_trace(params, m);
        write_text(dir / "trace.jsonl", aeb::trace_jsonl(trace));
        files.push_back("trace.jsonl");
        man.summary["v2_rejections"] = trace.v2_rejections;
        if (cfg.mu_mc > 0) {
            const auto mu = estimate_mu(trace, cfg.mu_mc, derive_seed(cfg.seed, 0x6d75));
            man.summary["mu_measured"] = mu.mu_hat;
        }
    });

    DiscardResult discard;
    const double rho = cfg.rho;
    st.run("discard", kExitNumerical, [&](auto& files) {
        discard = discard_redundant(trace.samples, params.effective_direction(), rho);
        write_text(dir / "discard.json", dump(to_json(discard.report)));
        files.push_back("discard.json");
        man.summary["discarded_fraction"] = discard.report.discarded_fraction();
        man.summary["kept"] = discard.report.kept;
    });

    FitResult fr;
    st.run("fit", kExitNumerical, [&](auto& files) {
        const auto opts = aeb_build_options(params, cfg.facets, rho, discard.report.window);
        const auto model = build_model(discard.kept, opts);
        write_text(dir / "model.lp", export_lp(model));
        files.push_back("model.lp");
        fr = fit(model, cfg.fit_options());
        write_text(dir / "solve.json", dump(to_json(fr)));
        files.push_back("solve.json");
        if (!fr.ok() || !fr.check.feasible())
            throw std::runtime_error(std::string("solver returned no feasible hypothesis (status ") +
                                     to_string(fr.stage1.status) + ")");
        write_text(dir / "hypothesis.json", dump(to_json(fr.hypothesis)));
        files.push_back("hypothesis.json");
        man.summary["violations"] = fr.violations;
        man.summary["solve_status"] = to_string(fr.stage1.status);
        man.summary["solve_seconds"] = fr.stage1.seconds + (fr.stage2 ? fr.stage2->seconds : 0.0);
    });

    st.run("validate", kExitNumerical, [&](auto& files) {
        AebProcess proc(params, trace.last_target);
        ValidationOptions vo;
        vo.runs = cfg.runs;
        vo.samples_per_run = cfg.samples_per_run;
        vo.epsilon = cfg.bound.epsilon;
        vo.mu_max = cfg.bound.mu_max;
        vo.bins = cfg.bins;
        vo.exceed_limit = cfg.exceed_limit;
        vo.seed = derive_seed(cfg.seed, 0x7661);
        vo.threads = cfg.threads;
        const auto rep = monte_carlo_validate(fr.hypothesis, proc, vo);
        write_text(dir / "validation.json", dump(to_json(rep)));
        write_text(dir / "histogram.csv", histogram_csv(rep.hist));
        files.push_back("validation.json");
        files.push_back("histogram.csv");
        man.summary["validation_mean"] = rep.mean;
        man.summary["validation_max"] = rep.max;
        man.summary["exceed_fraction"] = rep.exceed_fraction;
        man.summary["bound_value"] = rep.bound_value;
    });

    man.finished = utc_timestamp();
    st.write_manifest();
    return man;
}

nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json j;
    j["tool"] = "driftpac";
    j["version"] = kToolVersion;
    j["started"] = m.started;
    j["finished"] = m.finished;
    j["config"] = m.config_text;
    j["config_file"] = "config.txt";
    j["stages"] = nlohmann::json::array();
    for (const auto& s : m.stages)
        j["stages"].push_back({{"name", s.name},
                               {"artifacts", s.artifacts},
                               {"started", s.started},
                               {"finished", s.finished},
                               {"seconds", s.seconds}});
    j["summary"] = m.summary;
    return j;
}

std::vector<std::string> verify_run_dir(const fs::path& dir) {
    std::vector<std::string> problems;
    nlohmann::json man;
    try {
        man = nlohmann::json::parse(read_text(dir / "manifest.json"));
    } catch (const std::exception& e) {
        return {std::string("manifest.json: ") + e.what()};
    }
    try {
        parse_config(read_text(dir / man.at("config_file").get<std::string>()));
    } catch (const std::exception& e) {
        problems.push_back(std::string("config: ") + e.what());
    }
    for (const auto& s : man.at("stages")) {
        for (const auto& a : s.at("artifacts")) {
            const auto name = a.get<std::string>();
            const fs::path p = dir / name;
            try {
                const auto text = read_text(p);
                const auto ext = p.extension().string();
                if (name == "trace.jsonl") {
                    std::istringstream is(text);
                    aeb::read_trace_jsonl(is);
                } else if (name == "hypothesis.json") {
                    polytope_from_json(nlohmann::json::parse(text));
                } else if (name == "model.lp") {
                    parse_lp(text);
                } else if (ext == ".json") {
                    const auto parsed = nlohmann::json::parse(text);
                    if (parsed.is_null()) throw std::runtime_error("empty document");
                } else if (ext == ".csv") {
                    if (text.rfind("bin_lo,bin_hi,count\n", 0) != 0) throw std::runtime_error("bad header");
                }
            } catch (const std::exception& e) {
                problems.push_back(name + ": " + e.what());
            }
        }
    }
    return problems;
}

}  // namespace driftpac
