#include "driftpac/bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace driftpac::bounds {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::domain_error(what);
}

void check_eps_delta_d(double epsilon, double delta, int vc_dim) {
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0,1)");
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
    require(vc_dim >= 1, "vc_dim must be >= 1");
}

// (5 k)(ln(c/delta) + d ln(40 k)) with k = (level + eps)/eps^2. The constant-
// target case is level = 0; computing k as (level/eps + 1)/eps makes that
// case reduce to 1/eps bit-for-bit.
template <typename T>
T vc_term(T epsilon, T delta, T level, int vc_dim, T c) {
    const T k = (level / epsilon + T(1)) / epsilon;
    return T(5) * k * (std::log(c / delta) + T(vc_dim) * std::log(T(40) * k));
}

template <typename T>
T mu_min_term(T delta, T mu_min) {
    return std::log(T(2) / delta) / (T(2) * mu_min * mu_min);
}

// Ceiling with a long-double re-evaluation when the double value sits within
// rounding distance of an integer.
template <typename F>
std::int64_t robust_ceil(double raw, F&& extended) {
    const double nearest = std::round(raw);
    if (std::fabs(raw - nearest) <= 1e-9 * std::max(1.0, std::fabs(raw))) {
        const long double ext = extended();
        return static_cast<std::int64_t>(std::ceil(ext - 1e-15L * ext));
    }
    return ceil_count(raw);
}

}  // namespace

std::string to_string(DominantTerm t) {
    return t == DominantTerm::MuMinTerm ? "mu_min" : "mu_max";
}

void BoundParams::validate() const {
    check_eps_delta_d(epsilon, delta, vc_dim);
    require(mu_min >= 0.0 && mu_min < 1.0, "mu_min must lie in [0,1)");
    require(mu_max >= 0.0 && mu_max < 1.0, "mu_max must lie in [0,1)");
    require(mu_min <= mu_max, "mu_min must not exceed mu_max");
    require(rho >= 0.0 && rho < 1.0, "rho must lie in [0,1)");
}

double hoeffding_tail(std::int64_t m, double tau) {
    require(m >= 1, "hoeffding_tail: m must be >= 1");
    require(tau > 0.0, "hoeffding_tail: tau must be > 0");
    return std::exp(-2.0 * tau * tau / static_cast<double>(m));
}

std::int64_t ceil_count(double raw) {
    return static_cast<std::int64_t>(std::ceil(raw));
}

double theorem1_raw(double epsilon, double delta, double rho, int vc_dim) {
    check_eps_delta_d(epsilon, delta, vc_dim);
    require(rho >= 0.0 && rho < 1.0, "rho must lie in [0,1)");
    return vc_term(epsilon, delta, rho, vc_dim, 4.0);
}

std::int64_t theorem1_bound(double epsilon, double delta, double rho, int vc_dim) {
    const double raw = theorem1_raw(epsilon, delta, rho, vc_dim);
    return robust_ceil(raw, [&] {
        return vc_term<long double>(epsilon, delta, rho, vc_dim, 4.0L);
    });
}

double constant_target_raw(double epsilon, double delta, int vc_dim) {
    check_eps_delta_d(epsilon, delta, vc_dim);
    return vc_term(epsilon, delta, 0.0, vc_dim, 4.0);
}

std::int64_t constant_target_bound(double epsilon, double delta, int vc_dim) {
    const double raw = constant_target_raw(epsilon, delta, vc_dim);
    return robust_ceil(raw, [&] {
        return vc_term<long double>(epsilon, delta, 0.0L, vc_dim, 4.0L);
    });
}

M0Result m0(double epsilon, double delta, double mu_min, double mu_max, int vc_dim) {
    check_eps_delta_d(epsilon, delta, vc_dim);
    require(mu_min > 0.0, "mu_min must be > 0 (the mu_min term diverges at 0)");
    require(mu_max < 0.25, "mu_max must satisfy mu_max < 1/4");
    require(mu_min <= mu_max, "mu_min must not exceed mu_max");

    M0Result r;
    r.mu_min_term = mu_min_term(delta, mu_min);
    r.mu_max_term = vc_term(epsilon, delta, 4.0 * mu_max, vc_dim, 8.0);
    r.dominant = r.mu_min_term >= r.mu_max_term ? DominantTerm::MuMinTerm
                                                : DominantTerm::MuMaxTerm;
    r.raw = std::max(r.mu_min_term, r.mu_max_term);
    r.m0 = robust_ceil(r.raw, [&] {
        const long double t1 = mu_min_term<long double>(delta, mu_min);
        const long double t2 =
            vc_term<long double>(epsilon, delta, 4.0L * mu_max, vc_dim, 8.0L);
        return std::max(t1, t2);
    });
    return r;
}

M0Result m0(const BoundParams& p) {
    return m0(p.epsilon, p.delta, p.mu_min, p.mu_max, p.vc_dim);
}

DisagreementReport empirical_disagreement(std::span<const std::uint8_t> a,
                                          std::span<const std::uint8_t> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("empirical_disagreement: label vectors differ in length");
    if (a.empty()) throw std::invalid_argument("empirical_disagreement: empty label vectors");
    DisagreementReport r;
    r.m = static_cast<std::int64_t>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r.count += (a[i] != 0) != (b[i] != 0);
    r.empirical = static_cast<double>(r.count) / static_cast<double>(r.m);
    return r;
}

std::vector<CurveRow> bound_curve(double delta, std::span<const MuPair> mu_pairs, int vc_dim,
                                  std::span<const double> epsilon_grid) {
    std::vector<CurveRow> rows;
    rows.reserve(mu_pairs.size() * epsilon_grid.size());
    for (const auto& mp : mu_pairs) {
        for (double eps : epsilon_grid) {
            const auto r = m0(eps, delta, mp.mu_min, mp.mu_max, vc_dim);
            rows.push_back({eps, mp.mu_min, mp.mu_max, vc_dim, delta, r.m0, r.dominant});
        }
    }
    return rows;
}

std::string curve_csv(std::span<const CurveRow> rows) {
    std::ostringstream os;
    os.precision(12);
    os << "epsilon,mu_min,mu_max,vc_dim,delta,m0,dominant_term\n";
    for (const auto& r : rows) {
        os << r.epsilon << ',' << r.mu_min << ',' << r.mu_max << ',' << r.vc_dim << ','
           << r.delta << ',' << r.m0 << ',' << to_string(r.dominant) << '\n';
    }
    return os.str();
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi >= lo) || n < 1) throw std::invalid_argument("log_grid: bad range");
    std::vector<double> g(static_cast<std::size_t>(n));
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    g.back() = hi;
    return g;
}

}  // namespace driftpac::bounds
