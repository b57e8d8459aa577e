#include "driftpac/drift_sim.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace driftpac {
namespace aeb {

namespace {

constexpr std::uint64_t kPointStream = 0x706f696e74;  // "point"
constexpr std::uint64_t kDriftStream = 0x6472696674;  // "drift"
constexpr std::uint64_t kMuStream = 0x6d75;           // "mu"

}  // namespace

std::string to_string(MassDrift d) { return d == MassDrift::Independent ? "independent" : "compound"; }

MassDrift mass_drift_from_string(const std::string& s) {
    if (s == "independent") return MassDrift::Independent;
    if (s == "compound") return MassDrift::Compound;
    throw std::invalid_argument("mass_drift must be \"independent\" or \"compound\", got \"" + s + "\"");
}

void AebParams::validate() const {
    auto need = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("AebParams: ") + what);
    };
    need(l_min > 0.0 && l_max >= l_min, "l range must be positive with l_min <= l_max");
    need(v2_std > 0.0 && v2_mean > 0.0, "v2 mean and std must be positive");
    need(v2_cap_sd > 0.0, "v2_cap_sd must be positive");
    need(mass0 > 0.0 && force0 > 0.0, "mass0 and force0 must be positive");
    need(omega_f_std >= 0.0 && omega_m_std >= 0.0, "omega std parameters must be nonnegative");
    need(omega_f_mean > 0.0 && omega_m_mean > 0.0, "omega means must be positive");
}

BoxDomain AebParams::domain() const {
    return BoxDomain({l_min, 0.0}, {l_max, v2_mean + v2_cap_sd * v2_std});
}

double AebParams::rotation_angle() const { return std::atan(mass0 / (2.0 * force0)); }

Matrix AebParams::facet_normals() const { return rotated_box_normals(-rotation_angle()); }

std::vector<double> AebParams::effective_direction() const {
    const Matrix A = facet_normals();
    return {A(2, 0), A(2, 1)};
}

nlohmann::json to_json(const AebParams& p) {
    return {{"l_min", p.l_min},
            {"l_max", p.l_max},
            {"v2_mean", p.v2_mean},
            {"v2_std", p.v2_std},
            {"v2_cap_sd", p.v2_cap_sd},
            {"mass0", p.mass0},
            {"force0", p.force0},
            {"omega_f_mean", p.omega_f_mean},
            {"omega_f_std", p.omega_f_std},
            {"omega_m_mean", p.omega_m_mean},
            {"omega_m_std", p.omega_m_std},
            {"mass_drift", to_string(p.mass_drift)},
            {"seed", p.seed}};
}

AebParams aeb_params_from_json(const nlohmann::json& j) {
    AebParams p;
    p.l_min = j.at("l_min").get<double>();
    p.l_max = j.at("l_max").get<double>();
    p.v2_mean = j.at("v2_mean").get<double>();
    p.v2_std = j.at("v2_std").get<double>();
    p.v2_cap_sd = j.at("v2_cap_sd").get<double>();
    p.mass0 = j.at("mass0").get<double>();
    p.force0 = j.at("force0").get<double>();
    p.omega_f_mean = j.at("omega_f_mean").get<double>();
    p.omega_f_std = j.at("omega_f_std").get<double>();
    p.omega_m_mean = j.at("omega_m_mean").get<double>();
    p.omega_m_std = j.at("omega_m_std").get<double>();
    p.mass_drift = mass_drift_from_string(j.at("mass_drift").get<std::string>());
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

int aeb_label(double l, double v2, double mass, double force) {
    if (!(force > 0.0)) throw std::invalid_argument("aeb_label: braking force must be positive");
    if (!(mass > 0.0)) throw std::invalid_argument("aeb_label: mass must be positive");
    return 0.5 * v2 * (mass / force) <= l ? 1 : 0;
}

int aeb_label_kmh(double l, double v_kmh, double mass, double force) {
    const double v = kmh_to_ms(v_kmh);
    return aeb_label(l, v * v, mass, force);
}

int AebTarget::label(double l, double v2) const { return aeb_label(l, v2, mass, force); }

AebTarget next_target(const AebTarget& prev, const AebParams& p, Rng& rng) {
    std::normal_distribution<double> wf(p.omega_f_mean, p.omega_f_std);
    std::normal_distribution<double> wm(p.omega_m_mean, p.omega_m_std);
    AebTarget next;
    next.force = p.omega_f_std > 0.0 ? wf(rng) * prev.force : p.omega_f_mean * prev.force;
    const double factor = p.omega_m_std > 0.0 ? wm(rng) : p.omega_m_mean;
    next.mass = factor * (p.mass_drift == MassDrift::Independent ? p.mass0 : prev.mass);
    return next;
}

std::array<double, 2> draw_point(const AebParams& p, Rng& rng, std::uint64_t* rejections) {
    std::uniform_real_distribution<double> ul(p.l_min, p.l_max);
    std::normal_distribution<double> nv(p.v2_mean, p.v2_std);
    const double cap = p.v2_mean + p.v2_cap_sd * p.v2_std;
    const double l = ul(rng);
    double v2 = nv(rng);
    while (v2 < 0.0 || v2 > cap) {
        if (rejections) ++*rejections;
        v2 = nv(rng);
    }
    return {l, v2};
}

DriftTrace generate_trace(const AebParams& params, std::int64_t m) {
    params.validate();
    if (m < 1) throw std::invalid_argument("generate_trace: m must be >= 1");
    DriftTrace t;
    t.config = params;
    t.samples.reserve(static_cast<std::size_t>(m));
    t.brake_ratio.reserve(static_cast<std::size_t>(m));

    Rng points(derive_seed(params.seed, kPointStream));
    Rng drift(derive_seed(params.seed, kDriftStream));
    AebTarget cur{params.mass0, params.force0};
    for (std::int64_t i = 1; i <= m; ++i) {
        if (i > 1) cur = next_target(cur, params, drift);
        const auto x = draw_point(params, points, &t.v2_rejections);
        LabeledSample s;
        s.index = i;
        s.x = {x[0], x[1]};
        s.label = static_cast<std::uint8_t>(cur.label(x[0], x[1]));
        t.samples.push_back(std::move(s));
        t.brake_ratio.push_back(cur.brake_ratio());
    }
    t.last_target = cur;
    t.final_target = next_target(cur, params, drift);
    return t;
}

void write_trace_jsonl(const DriftTrace& t, std::ostream& os) {
    nlohmann::json header = {{"type", "header"},
                             {"config", to_json(t.config)},
                             {"seed", t.config.seed},
                             {"m", t.samples.size()},
                             {"theta", t.config.rotation_angle()},
                             {"v2_rejections", t.v2_rejections},
                             {"last_target", {{"mass", t.last_target.mass}, {"force", t.last_target.force}}},
                             {"final_target", {{"mass", t.final_target.mass}, {"force", t.final_target.force}}}};
    os << header.dump() << '\n';
    for (std::size_t k = 0; k < t.samples.size(); ++k) {
        const auto& s = t.samples[k];
        nlohmann::json line = {{"i", s.index},
                               {"l", s.x[0]},
                               {"v2", s.x[1]},
                               {"label", static_cast<int>(s.label)},
                               {"brake_ratio", t.brake_ratio[k]}};
        os << line.dump() << '\n';
    }
}

std::string trace_jsonl(const DriftTrace& t) {
    std::ostringstream os;
    write_trace_jsonl(t, os);
    return os.str();
}

DriftTrace read_trace_jsonl(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("trace: missing header line");
    const auto header = nlohmann::json::parse(line);
    if (header.value("type", "") != "header") throw std::runtime_error("trace: first line is not a header");
    DriftTrace t;
    t.config = aeb_params_from_json(header.at("config"));
    t.v2_rejections = header.value("v2_rejections", std::uint64_t{0});
    t.last_target = {header.at("last_target").at("mass").get<double>(),
                     header.at("last_target").at("force").get<double>()};
    t.final_target = {header.at("final_target").at("mass").get<double>(),
                      header.at("final_target").at("force").get<double>()};
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        LabeledSample s;
        s.index = j.at("i").get<std::int64_t>();
        s.x = {j.at("l").get<double>(), j.at("v2").get<double>()};
        const int lab = j.at("label").get<int>();
        if (lab != 0 && lab != 1) throw std::runtime_error("trace: label must be 0 or 1");
        s.label = static_cast<std::uint8_t>(lab);
        t.samples.push_back(std::move(s));
        t.brake_ratio.push_back(j.at("brake_ratio").get<double>());
    }
    const auto expected = header.at("m").get<std::size_t>();
    if (expected != t.samples.size()) throw std::runtime_error("trace: sample count does not match header");
    return t;
}

void write_trace_csv(const DriftTrace& t, std::ostream& os) {
    os << "i,l,v2,label,brake_ratio\n";
    char buf[160];
    for (std::size_t k = 0; k < t.samples.size(); ++k) {
        const auto& s = t.samples[k];
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%d,%.17g\n", static_cast<long long>(s.index),
                      s.x[0], s.x[1], static_cast<int>(s.label), t.brake_ratio[k]);
        os << buf;
    }
}

}  // namespace aeb

MuEstimate estimate_mu(std::span<const Labeler> steps, const Labeler& final_target,
                       const PointSampler& sampler, std::int64_t n_mc, std::uint64_t seed) {
    if (n_mc < 1) throw std::invalid_argument("estimate_mu: n_mc must be >= 1");
    if (steps.empty()) throw std::invalid_argument("estimate_mu: no steps");
    MuEstimate out;
    out.per_step.resize(steps.size());
    double total = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        Rng rng(derive_seed(seed, aeb::kMuStream, i));
        std::int64_t diff = 0;
        for (std::int64_t k = 0; k < n_mc; ++k) {
            const auto x = sampler(rng);
            diff += steps[i](x) != final_target(x);
        }
        out.per_step[i] = static_cast<double>(diff) / static_cast<double>(n_mc);
        total += out.per_step[i];
    }
    out.mu_hat = total / static_cast<double>(steps.size());
    return out;
}

MuEstimate estimate_mu(const aeb::DriftTrace& trace, std::int64_t n_mc, std::uint64_t seed) {
    if (n_mc < 1) throw std::invalid_argument("estimate_mu: n_mc must be >= 1");
    if (trace.brake_ratio.empty()) throw std::invalid_argument("estimate_mu: empty trace");
    const double final_ratio = trace.final_target.brake_ratio();
    MuEstimate out;
    out.per_step.resize(trace.brake_ratio.size());
    double total = 0.0;
    for (std::size_t i = 0; i < trace.brake_ratio.size(); ++i) {
        Rng rng(derive_seed(seed, aeb::kMuStream, i));
        const double r = trace.brake_ratio[i];
        std::int64_t diff = 0;
        if (r != final_ratio) {
            for (std::int64_t k = 0; k < n_mc; ++k) {
                const auto x = aeb::draw_point(trace.config, rng);
                const bool a = 0.5 * x[1] * r <= x[0];
                const bool b = 0.5 * x[1] * final_ratio <= x[0];
                diff += a != b;
            }
        }
        out.per_step[i] = static_cast<double>(diff) / static_cast<double>(n_mc);
        total += out.per_step[i];
    }
    out.mu_hat = total / static_cast<double>(trace.brake_ratio.size());
    return out;
}

}  // namespace driftpac
