// driftpac: sample bounds, braking simulation, minimal-disagreement fitting
// and Monte Carlo validation from the command line.

#include "driftpac/bounds.hpp"
#include "driftpac/config.hpp"
#include "driftpac/drift_sim.hpp"
#include "driftpac/fit.hpp"
#include "driftpac/lp_format.hpp"
#include "driftpac/pipeline.hpp"
#include "driftpac/preprocess.hpp"
#include "driftpac/validate.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace driftpac;

namespace {

struct Common {
    std::string config_file;
    std::vector<std::string> sets;

    RunConfig load() const {
        RunConfig cfg = config_file.empty() ? RunConfig{} : load_config(config_file);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
            set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
        }
        cfg.validate();
        return cfg;
    }
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("-c,--config", c.config_file, "key = value config file");
    app->add_option("-s,--set", c.sets, "override one config key (key=value), repeatable");
}

std::string g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

aeb::DriftTrace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read trace " + path);
    return aeb::read_trace_jsonl(in);
}

fs::path ensure_dir(const std::string& d) {
    fs::create_directories(d);
    return d;
}

std::vector<bounds::MuPair> parse_pairs(const std::string& s) {
    std::vector<bounds::MuPair> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("--pairs expects mu_min:mu_max[,...]");
        out.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    }
    return out;
}

ThetaWindow window_from_json(const nlohmann::json& j) {
    ThetaWindow w;
    const auto& win = j.at("window");
    if (!win.at(0).is_null()) w.lo = win.at(0).get<double>();
    if (!win.at(1).is_null()) w.hi = win.at(1).get<double>();
    return w;
}

int cmd_bound(const Common& common, const std::string& curve, double eps_min, double eps_max, int points,
              const std::string& pairs, int curve_dim, bool json) {
    const RunConfig cfg = common.load();
    const auto& b = cfg.bound;
    const auto r = bounds::m0(b);
    if (json) {
        std::cout << nlohmann::json{{"mu_min_term", r.mu_min_term},
                                    {"mu_max_term", r.mu_max_term},
                                    {"raw", r.raw},
                                    {"m0", r.m0},
                                    {"dominant_term", bounds::to_string(r.dominant)}}
                         .dump(2)
                  << '\n';
    } else {
        std::cout << "epsilon       " << g12(b.epsilon) << '\n'
                  << "delta         " << g12(b.delta) << '\n'
                  << "mu_min        " << g12(b.mu_min) << '\n'
                  << "mu_max        " << g12(b.mu_max) << '\n'
                  << "vc_dim        " << b.vc_dim << '\n'
                  << "mu_min term   " << g12(r.mu_min_term) << '\n'
                  << "mu_max term   " << g12(r.mu_max_term) << '\n'
                  << "max           " << g12(r.raw) << '\n'
                  << "dominant      " << bounds::to_string(r.dominant) << '\n'
                  << "m0            " << r.m0 << '\n';
    }
    if (!curve.empty()) {
        const auto mp = parse_pairs(pairs);
        const auto grid = bounds::log_grid(eps_min, eps_max, points);
        const auto rows = bounds::bound_curve(b.delta, mp, curve_dim, grid);
        write_text(curve, bounds::curve_csv(rows));
        std::cerr << "wrote " << rows.size() << " rows to " << curve << '\n';
    }
    return kExitOk;
}

int cmd_simulate(const Common& common, const std::string& out, const std::string& csv) {
    const RunConfig cfg = common.load();
    aeb::AebParams p = cfg.aeb;
    p.seed = cfg.seed;
    const std::int64_t m = cfg.m > 0 ? cfg.m : bounds::m0(cfg.bound).m0;
    const auto trace = aeb::generate_trace(p, m);
    write_text(out, aeb::trace_jsonl(trace));
    if (!csv.empty()) {
        std::ofstream os(csv);
        aeb::write_trace_csv(trace, os);
    }
    std::int64_t ones = 0;
    for (const auto& s : trace.samples) ones += s.label;
    std::cout << "samples " << m << ", label-1 " << ones << ", v2 redraws " << trace.v2_rejections << '\n';
    return kExitOk;
}

int cmd_discard(const Common& common, const std::string& trace_path, const std::string& out_dir) {
    const RunConfig cfg = common.load();
    const auto trace = load_trace(trace_path);
    const auto res = discard_redundant(trace.samples, trace.config.effective_direction(), cfg.rho);
    const auto dir = ensure_dir(out_dir);
    write_text(dir / "discard.json", to_json(res.report).dump(2) + "\n");

    aeb::DriftTrace kept = trace;
    kept.samples.clear();
    kept.brake_ratio.clear();
    std::size_t k = 0;
    for (std::size_t i = 0; i < trace.samples.size() && k < res.kept.size(); ++i) {
        if (trace.samples[i].index != res.kept[k].index) continue;
        kept.samples.push_back(trace.samples[i]);
        kept.brake_ratio.push_back(trace.brake_ratio[i]);
        ++k;
    }
    write_text(dir / "kept.jsonl", aeb::trace_jsonl(kept));
    const auto& r = res.report;
    std::cout << "kept " << r.kept << " of " << r.total << " (discarded " << g12(100.0 * r.discarded_fraction())
              << "%)\n";
    if (!r.warning.empty()) std::cerr << "warning: " << r.warning << '\n';
    if (!r.notice.empty()) std::cerr << "notice: " << r.notice << '\n';
    return kExitOk;
}

int cmd_fit(const Common& common, const std::string& trace_path, const std::string& discard_path,
            const std::string& out_dir, bool lp_only) {
    const RunConfig cfg = common.load();
    const auto trace = load_trace(trace_path);
    std::optional<ThetaWindow> window;
    if (!discard_path.empty()) window = window_from_json(nlohmann::json::parse(read_text(discard_path)));
    const auto opts = aeb_build_options(trace.config, cfg.facets, cfg.rho, window);
    const auto model = build_model(trace.samples, opts);
    const auto dir = ensure_dir(out_dir);
    write_text(dir / "model.lp", export_lp(model));
    if (lp_only) return kExitOk;
    const auto fr = fit(model, cfg.fit_options());
    write_text(dir / "solve.json", to_json(fr).dump(2) + "\n");
    for (const auto& w : fr.warnings) std::cerr << "warning: " << w << '\n';
    if (!fr.ok() || !fr.check.feasible()) {
        std::cerr << "error: no feasible hypothesis (status " << to_string(fr.stage1.status) << ")\n";
        return kExitNumerical;
    }
    write_text(dir / "hypothesis.json", to_json(fr.hypothesis).dump(2) + "\n");
    std::cout << "status " << to_string(fr.stage1.status) << ", violations " << fr.violations << ", nodes "
              << fr.stage1.nodes << '\n';
    return kExitOk;
}

int cmd_validate(const Common& common, const std::string& hyp_path, const std::string& trace_path,
                 const std::string& out_dir) {
    const RunConfig cfg = common.load();
    const auto hyp = polytope_from_json(nlohmann::json::parse(read_text(hyp_path)));
    const auto trace = load_trace(trace_path);
    AebProcess proc(trace.config, trace.last_target);
    ValidationOptions vo;
    vo.runs = cfg.runs;
    vo.samples_per_run = cfg.samples_per_run;
    vo.epsilon = cfg.bound.epsilon;
    vo.mu_max = cfg.bound.mu_max;
    vo.bins = cfg.bins;
    vo.exceed_limit = cfg.exceed_limit;
    vo.seed = derive_seed(cfg.seed, 0x7661);
    vo.threads = cfg.threads;
    const auto rep = monte_carlo_validate(hyp, proc, vo);
    const auto dir = ensure_dir(out_dir);
    write_text(dir / "validation.json", to_json(rep).dump(2) + "\n");
    write_text(dir / "histogram.csv", histogram_csv(rep.hist));
    std::cout << "mean " << g12(rep.mean) << ", max " << g12(rep.max) << ", bound " << g12(rep.bound_value)
              << ", runs above bound " << rep.exceed_count << "/" << rep.runs << '\n';
    return rep.within_limit() ? kExitOk : kExitNumerical;
}

int cmd_pipeline(const Common& common, const std::string& out) {
    const RunConfig cfg = common.load();
    const fs::path dir = out.empty() ? default_run_dir(cfg) : fs::path(out);
    const auto man = run_pipeline(cfg, dir);
    std::cout << "run directory " << dir.string() << '\n' << man.summary.dump(2) << '\n';
    return kExitOk;
}

int cmd_report(const std::string& run_dir) {
    const auto problems = verify_run_dir(run_dir);
    nlohmann::json man;
    try {
        man = nlohmann::json::parse(read_text(fs::path(run_dir) / "manifest.json"));
    } catch (const std::exception&) {
        for (const auto& p : problems) std::cerr << "problem: " << p << '\n';
        return kExitUsage;
    }
    std::cout << "run " << run_dir << " (driftpac " << man.value("version", "?") << ")\n";
    for (const auto& s : man.at("stages"))
        std::cout << "  " << s.at("name").get<std::string>() << ": " << s.at("artifacts").dump() << '\n';
    std::cout << man.at("summary").dump(2) << '\n';
    for (const auto& p : problems) std::cerr << "problem: " << p << '\n';
    return problems.empty() ? kExitOk : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driftpac: learning drifting targets with minimal-disagreement polytopes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    Common common;
    std::string curve, pairs = "0.005:0.02,0.01:0.05,0.02:0.1";
    double eps_min = 1e-3, eps_max = 0.1;
    int points = 60, curve_dim = 4;
    bool json = false;
    auto* bound = app.add_subcommand("bound", "sample bound m0 and its two terms");
    add_common(bound, common);
    double epsilon = -1, delta = -1, mu_min = -1, mu_max = -1;
    int vc_dim = -1;
    bound->add_option("--epsilon", epsilon, "accuracy");
    bound->add_option("--delta", delta, "confidence parameter");
    bound->add_option("--mu-min", mu_min, "lower bound on the target change");
    bound->add_option("--mu-max", mu_max, "upper bound on the target change");
    bound->add_option("--vc-dim", vc_dim, "VC dimension");
    bound->add_option("--curve", curve, "also write an m0-versus-epsilon CSV here");
    bound->add_option("--eps-min", eps_min, "curve: smallest epsilon");
    bound->add_option("--eps-max", eps_max, "curve: largest epsilon");
    bound->add_option("--points", points, "curve: grid points (log spaced)");
    bound->add_option("--pairs", pairs, "curve: mu_min:mu_max pairs, comma separated");
    bound->add_option("--curve-vc-dim", curve_dim, "curve: VC dimension");
    bound->add_flag("--json", json, "print JSON");

    std::string out = "trace.jsonl", csv;
    auto* simulate = app.add_subcommand("simulate", "generate a braking trace");
    add_common(simulate, common);
    std::int64_t m = 0;
    simulate->add_option("-m,--samples", m, "number of samples (default: m0)");
    simulate->add_option("-o,--out", out, "trace JSONL output");
    simulate->add_option("--csv", csv, "optional CSV copy");

    std::string trace_path, out_dir = ".", discard_path, hyp_path, run_dir;
    auto* discard = app.add_subcommand("discard", "drop samples that cannot move the optimal threshold");
    add_common(discard, common);
    discard->add_option("-t,--trace", trace_path, "trace JSONL")->required();
    discard->add_option("-o,--out-dir", out_dir, "writes discard.json and kept.jsonl");

    bool lp_only = false;
    auto* fitc = app.add_subcommand("fit", "minimal-disagreement hypothesis");
    add_common(fitc, common);
    fitc->add_option("-t,--trace", trace_path, "trace JSONL (typically kept.jsonl)")->required();
    fitc->add_option("-d,--discard", discard_path, "discard.json whose threshold window restricts the fit");
    fitc->add_option("-o,--out-dir", out_dir, "writes model.lp, solve.json, hypothesis.json");
    fitc->add_flag("--lp-only", lp_only, "export the model and stop");
    double time_limit = -1, gap = -1;
    std::int64_t node_limit = -1;
    for (auto* sc : {fitc}) {
        sc->add_option("--time-limit", time_limit, "solver time limit [s]");
        sc->add_option("--node-limit", node_limit, "solver node limit");
        sc->add_option("--gap", gap, "relative gap");
    }

    auto* validate = app.add_subcommand("validate", "Monte Carlo check against fresh targets");
    add_common(validate, common);
    validate->add_option("-H,--hypothesis", hyp_path, "hypothesis.json")->required();
    validate->add_option("-t,--trace", trace_path, "training trace (for the last target)")->required();
    validate->add_option("-o,--out-dir", out_dir, "writes validation.json and histogram.csv");

    std::string run_out;
    auto* pipeline = app.add_subcommand("pipeline", "bound, simulate, discard, fit and validate in one run");
    add_common(pipeline, common);
    pipeline->add_option("-o,--out", run_out, "run directory (default runs/<timestamp>-<seed>)");
    for (auto* sc : {pipeline}) {
        sc->add_option("--time-limit", time_limit, "solver time limit [s]");
        sc->add_option("--node-limit", node_limit, "solver node limit");
        sc->add_option("--gap", gap, "relative gap");
    }

    auto* report = app.add_subcommand("report", "summarize and check a run directory");
    report->add_option("run", run_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    auto push = [&](const char* key, auto value, bool given) {
        if (given) common.sets.push_back(std::string(key) + "=" + std::to_string(value));
    };
    push("m", m, m > 0);
    push("time_limit", time_limit, time_limit > 0);
    push("node_limit", node_limit, node_limit > 0);
    push("gap", gap, gap >= 0);
    auto push_g = [&](const char* key, double v) {
        if (v < 0) return;
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        common.sets.push_back(std::string(key) + "=" + buf);
    };
    push_g("epsilon", epsilon);
    push_g("delta", delta);
    push_g("mu_min", mu_min);
    push_g("mu_max", mu_max);
    push("vc_dim", vc_dim, vc_dim >= 0);

    try {
        if (*bound) return cmd_bound(common, curve, eps_min, eps_max, points, pairs, curve_dim, json);
        if (*simulate) return cmd_simulate(common, out, csv);
        if (*discard) return cmd_discard(common, trace_path, out_dir);
        if (*fitc) return cmd_fit(common, trace_path, discard_path, out_dir, lp_only);
        if (*validate) return cmd_validate(common, hyp_path, trace_path, out_dir);
        if (*pipeline) return cmd_pipeline(common, run_out);
        if (*report) return cmd_report(run_dir);
    } catch (const StageError& e) {
        std::cerr << "error in stage " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitUsage;
}
