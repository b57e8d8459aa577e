#include "driftpac/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace driftpac {

std::vector<Projection> project(std::span<const LabeledSample> samples, std::span<const double> direction) {
    std::vector<Projection> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.x.size() != direction.size()) throw std::invalid_argument("project: dimension mismatch");
        const double t = dot(direction, s.x);
        if (!std::isfinite(t)) throw std::invalid_argument("project: non-finite projection");
        out.push_back({s.index, t, s.label});
    }
    return out;
}

namespace {

std::int64_t count_distinct(std::span<const LabeledSample> samples, const std::vector<bool>& mask, bool want) {
    std::set<std::pair<std::vector<double>, std::uint8_t>> seen;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (mask[i] == want) seen.insert({samples[i].x, samples[i].label});
    return static_cast<std::int64_t>(seen.size());
}

}  // namespace

DiscardResult discard_redundant(std::span<const LabeledSample> samples, std::span<const double> direction,
                                double rho) {
    const auto proj = project(samples, direction);
    DiscardResult res;
    auto& r = res.report;
    r.total = static_cast<std::int64_t>(samples.size());
    if (samples.empty()) return res;

    std::ptrdiff_t arg_hi = -1, arg_lo = -1;  // argmax label-1, argmin label-0
    for (std::size_t i = 0; i < proj.size(); ++i) {
        if (proj[i].label == 1 && (arg_hi < 0 || proj[i].t > proj[static_cast<std::size_t>(arg_hi)].t))
            arg_hi = static_cast<std::ptrdiff_t>(i);
        if (proj[i].label == 0 && (arg_lo < 0 || proj[i].t < proj[static_cast<std::size_t>(arg_lo)].t))
            arg_lo = static_cast<std::ptrdiff_t>(i);
    }

    std::vector<bool> keep(proj.size(), false);
    if (arg_hi < 0 || arg_lo < 0) {
        const auto witness = static_cast<std::size_t>(arg_hi >= 0 ? arg_hi : arg_lo);
        keep[witness] = true;
        r.warning = arg_hi < 0 ? "no label-1 samples; kept one label-0 witness"
                               : "no label-0 samples; kept one label-1 witness";
        r.theta_hi = arg_hi >= 0 ? proj[witness].t : -INFINITY;
        r.theta_lo = arg_lo >= 0 ? proj[witness].t : INFINITY;
        r.separable = true;
    } else {
        r.theta_hi = proj[static_cast<std::size_t>(arg_hi)].t;
        r.theta_lo = proj[static_cast<std::size_t>(arg_lo)].t;
        r.separable = r.theta_hi < r.theta_lo;
        for (std::size_t i = 0; i < proj.size(); ++i) {
            const auto& p = proj[i];
            keep[i] = p.label == 1 ? !(p.t < r.theta_lo) : !(p.t > r.theta_hi);
        }
        keep[static_cast<std::size_t>(arg_hi)] = true;
        keep[static_cast<std::size_t>(arg_lo)] = true;
    }

    double p_max = -INFINITY, q_min = INFINITY;
    for (std::size_t i = 0; i < proj.size(); ++i) {
        if (keep[i]) {
            res.kept.push_back(samples[i]);
            continue;
        }
        if (proj[i].label == 1) {
            ++r.discarded_I1;
            p_max = std::max(p_max, proj[i].t);
        } else {
            ++r.discarded_I0;
            q_min = std::min(q_min, proj[i].t);
        }
    }
    r.kept = static_cast<std::int64_t>(res.kept.size());
    r.window = {p_max, q_min - rho};
    if (!(r.window.lo <= r.window.hi)) {
        r.window = {};
        r.notice = "discarded samples leave no common threshold window; fit is left unrestricted";
    }
    r.distinct_total = count_distinct(samples, std::vector<bool>(samples.size(), true), true);
    r.distinct_discarded = count_distinct(samples, keep, false);
    return res;
}

DiscardResult discard_redundant(std::span<const LabeledSample> samples, const Matrix& normals, double rho) {
    if (normals.rows == 1) return discard_redundant(samples, normals.row(0), rho);
    DiscardResult res;
    res.kept.assign(samples.begin(), samples.end());
    auto& r = res.report;
    r.total = r.kept = static_cast<std::int64_t>(samples.size());
    r.distinct_total = count_distinct(samples, std::vector<bool>(samples.size(), true), true);
    r.theta_lo = r.theta_hi = NAN;
    r.notice = "discarding applies to a single effective facet only; samples passed through unchanged";
    return res;
}

std::int64_t threshold_errors(std::span<const Projection> proj, double theta) {
    std::int64_t e = 0;
    for (const auto& p : proj) e += (p.t <= theta) != (p.label == 1);
    return e;
}

ThresholdResult threshold_oracle(std::span<const Projection> proj) {
    if (proj.empty()) throw std::invalid_argument("threshold_oracle: no samples");
    std::vector<Projection> s(proj.begin(), proj.end());
    std::sort(s.begin(), s.end(), [](const Projection& a, const Projection& b) { return a.t < b.t; });

    // theta below every projection: every label-1 sample is an error.
    std::int64_t errors = 0;
    for (const auto& p : s) errors += p.label == 1;

    struct Region {
        double lo, hi;
        std::int64_t e;
    };
    std::vector<Region> regions{{-INFINITY, s.front().t, errors}};
    for (std::size_t i = 0; i < s.size();) {
        const double t = s[i].t;
        for (; i < s.size() && s[i].t == t; ++i) errors += s[i].label == 1 ? -1 : 1;
        regions.push_back({t, i < s.size() ? s[i].t : INFINITY, errors});
    }

    ThresholdResult out;
    out.count = regions.front().e;
    for (const auto& g : regions) out.count = std::min(out.count, g.e);
    for (const auto& g : regions) {
        if (g.e != out.count) continue;
        if (!out.optimal.empty() && out.optimal.back().hi == g.lo)
            out.optimal.back().hi = g.hi;
        else
            out.optimal.push_back({g.lo, g.hi});
    }
    return out;
}

ThresholdResult threshold_oracle(std::span<const LabeledSample> samples, std::span<const double> direction) {
    const auto proj = project(samples, direction);
    return threshold_oracle(proj);
}

nlohmann::json to_json(const DiscardReport& r) {
    auto num = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) return v;
        return nullptr;
    };
    nlohmann::json j;
    j["total"] = r.total;
    j["kept"] = r.kept;
    j["discarded_I1"] = r.discarded_I1;
    j["discarded_I0"] = r.discarded_I0;
    j["discarded_fraction"] = r.discarded_fraction();
    j["theta_lo"] = num(r.theta_lo);
    j["theta_hi"] = num(r.theta_hi);
    j["window"] = {num(r.window.lo), num(r.window.hi)};
    j["distinct_total"] = r.distinct_total;
    j["distinct_discarded"] = r.distinct_discarded;
    j["separable"] = r.separable;
    j["warning"] = r.warning;
    j["notice"] = r.notice;
    return j;
}

}  // namespace driftpac
