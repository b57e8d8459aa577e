#include "driftpac/validate.hpp"

#include "driftpac/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace driftpac {

namespace {
constexpr std::uint64_t kRunStream = 0x76616c6964ULL;
}

AebProcess::AebProcess(aeb::AebParams params, aeb::AebTarget last) : params_(std::move(params)), last_(last) {
    params_.validate();
}

Labeler AebProcess::next_target(Rng& rng) const {
    const auto f = aeb::next_target(last_, params_, rng);
    return [f](std::span<const double> x) { return f(x); };
}

std::vector<double> AebProcess::sample_point(Rng& rng) const {
    const auto p = aeb::draw_point(params_, rng);
    return {p[0], p[1]};
}

StaticProcess::StaticProcess(Labeler target, PointSampler sampler)
    : target_(std::move(target)), sampler_(std::move(sampler)) {}

Labeler StaticProcess::next_target(Rng&) const { return target_; }

std::vector<double> StaticProcess::sample_point(Rng& rng) const { return sampler_(rng); }

Histogram histogram(std::span<const double> values, int bins, std::optional<std::pair<double, double>> range) {
    if (values.empty()) throw std::invalid_argument("histogram: no values");
    if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
    double lo, hi;
    if (range) {
        std::tie(lo, hi) = *range;
        if (!(lo < hi)) throw std::invalid_argument("histogram: range must satisfy lo < hi");
    } else {
        const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        lo = *mn;
        hi = *mx;
    }
    Histogram h;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    const double width = (hi - lo) / bins;
    for (int k = 0; k <= bins; ++k) h.edges.push_back(k == bins ? hi : lo + width * k);
    for (double v : values) {
        std::int64_t k = 0;
        if (width > 0.0) k = static_cast<std::int64_t>(std::floor((v - lo) / width));
        k = std::clamp<std::int64_t>(k, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(k)];
    }
    return h;
}

std::string histogram_csv(const Histogram& h) {
    std::ostringstream os;
    os.precision(12);
    os << "bin_lo,bin_hi,count\n";
    for (std::size_t k = 0; k < h.counts.size(); ++k) os << h.edges[k] << ',' << h.edges[k + 1] << ',' << h.counts[k] << '\n';
    return os.str();
}

ValidationReport monte_carlo_validate(const Polytope& hypothesis, const DriftProcess& process,
                                      const ValidationOptions& opts) {
    if (opts.runs < 1 || opts.samples_per_run < 1)
        throw std::invalid_argument("monte_carlo_validate: runs and samples_per_run must be >= 1");
    ValidationReport r;
    r.runs = opts.runs;
    r.samples_per_run = opts.samples_per_run;
    r.seed = opts.seed;
    r.bound_value = 4.0 * opts.mu_max + opts.epsilon;
    r.exceed_limit = opts.exceed_limit;
    r.counts.assign(static_cast<std::size_t>(opts.runs), 0);

    auto run_one = [&](std::int64_t run) {
        Rng rng(derive_seed(opts.seed, kRunStream, static_cast<std::uint64_t>(run)));
        const Labeler target = process.next_target(rng);
        std::vector<std::uint8_t> f(static_cast<std::size_t>(opts.samples_per_run));
        std::vector<std::uint8_t> h(f.size());
        for (std::size_t k = 0; k < f.size(); ++k) {
            const auto x = process.sample_point(rng);
            f[k] = static_cast<std::uint8_t>(target(x));
            h[k] = static_cast<std::uint8_t>(label(hypothesis, x));
        }
        return bounds::empirical_disagreement(f, h).count;
    };

    // Integer totals keep the streaming mean independent of completion order.
    std::int64_t streamed = 0;
    std::mutex mu;
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (std::int64_t run; (run = next.fetch_add(1)) < opts.runs;) {
            const auto c = run_one(run);
            std::lock_guard lock(mu);
            r.counts[static_cast<std::size_t>(run)] = c;
            streamed += c;
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(opts.runs)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    const double total = static_cast<double>(opts.runs) * static_cast<double>(opts.samples_per_run);
    std::int64_t listed = 0;
    for (auto c : r.counts) {
        listed += c;
        const double e = static_cast<double>(c) / static_cast<double>(opts.samples_per_run);
        r.per_run.push_back(e);
        r.exceed_count += e > r.bound_value;
    }
    r.mean = static_cast<double>(listed) / total;
    r.mean_streaming = static_cast<double>(streamed) / total;
    double ss = 0.0;
    for (double e : r.per_run) ss += (e - r.mean) * (e - r.mean);
    r.stddev = opts.runs > 1 ? std::sqrt(ss / static_cast<double>(opts.runs - 1)) : 0.0;
    r.min = *std::min_element(r.per_run.begin(), r.per_run.end());
    r.max = *std::max_element(r.per_run.begin(), r.per_run.end());
    r.exceed_fraction = static_cast<double>(r.exceed_count) / static_cast<double>(opts.runs);
    r.hist = histogram(r.per_run, opts.bins);
    std::ostringstream note;
    note << "confidence 1-delta is not checkable with " << opts.runs
         << " runs; reported instead: fraction of runs above 4*mu_max+epsilon, limit " << opts.exceed_limit;
    r.note = note.str();
    return r;
}

nlohmann::json to_json(const ValidationReport& r) {
    nlohmann::json j;
    j["runs"] = r.runs;
    j["samples_per_run"] = r.samples_per_run;
    j["seed"] = r.seed;
    j["mean"] = r.mean;
    j["mean_streaming"] = r.mean_streaming;
    j["stddev"] = r.stddev;
    j["min"] = r.min;
    j["max"] = r.max;
    j["bound_value"] = r.bound_value;
    j["exceed_count"] = r.exceed_count;
    j["exceed_fraction"] = r.exceed_fraction;
    j["exceed_limit"] = r.exceed_limit;
    j["within_limit"] = r.within_limit();
    j["per_run"] = r.per_run;
    j["counts"] = r.counts;
    j["histogram"] = {{"edges", r.hist.edges}, {"counts", r.hist.counts}};
    j["note"] = r.note;
    return j;
}

}  // namespace driftpac
