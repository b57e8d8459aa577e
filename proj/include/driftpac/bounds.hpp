#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace driftpac::bounds {

/// Inputs shared by the sample-complexity formulas.
struct BoundParams {
    double epsilon = 0.01;
    double delta = 1e-6;
    int vc_dim = 1;
    double mu_min = 0.0;
    double mu_max = 0.0;
    double rho = 0.0;

    /// Checks the ranges common to every bound; throws std::domain_error.
    void validate() const;

    bool operator==(const BoundParams&) const = default;
};

/// Which of the two terms of the drifting-target bound is larger.
enum class DominantTerm { MuMinTerm, MuMaxTerm };

std::string to_string(DominantTerm t);

/// Breakdown of the drifting-target sample bound.
struct M0Result {
    double mu_min_term = 0.0;  // (1/(2 mu_min^2)) ln(2/delta)
    double mu_max_term = 0.0;  // (5(4 mu_max + eps)/eps^2)(ln(8/delta) + d ln(40(4 mu_max + eps)/eps^2))
    double raw = 0.0;          // max of the two terms
    std::int64_t m0 = 0;       // smallest integer >= raw
    DominantTerm dominant = DominantTerm::MuMinTerm;
};

struct DisagreementReport {
    double empirical = 0.0;
    std::int64_t count = 0;
    std::int64_t m = 0;
};

/// exp(-2 tau^2 / m): tail bound on the deviation of a sum of m independent
/// Bernoulli variables above its mean.
double hoeffding_tail(std::int64_t m, double tau);

/// Sample bound for a constant target with empirical error level rho.
std::int64_t theorem1_bound(double epsilon, double delta, double rho, int vc_dim);
double theorem1_raw(double epsilon, double delta, double rho, int vc_dim);

/// Sample bound for a drifting target; requires 0 < mu_min <= mu_max < 1/4.
M0Result m0(double epsilon, double delta, double mu_min, double mu_max, int vc_dim);
M0Result m0(const BoundParams& p);

/// Constant-target bound (mu_min = mu_max = 0).
std::int64_t constant_target_bound(double epsilon, double delta, int vc_dim);
double constant_target_raw(double epsilon, double delta, int vc_dim);

/// Smallest integer >= raw. Values within a few ulps of an integer are
/// re-evaluated by the caller's extended-precision path before rounding.
std::int64_t ceil_count(double raw);

DisagreementReport empirical_disagreement(std::span<const std::uint8_t> a,
                                          std::span<const std::uint8_t> b);

struct CurveRow {
    double epsilon = 0.0;
    double mu_min = 0.0;
    double mu_max = 0.0;
    int vc_dim = 0;
    double delta = 0.0;
    std::int64_t m0 = 0;
    DominantTerm dominant = DominantTerm::MuMinTerm;
};

struct MuPair {
    double mu_min;
    double mu_max;
};

/// m0 over a grid of accuracies for each (mu_min, mu_max) pair, pair-major.
std::vector<CurveRow> bound_curve(double delta, std::span<const MuPair> mu_pairs, int vc_dim,
                                  std::span<const double> epsilon_grid);

/// CSV with header `epsilon,mu_min,mu_max,vc_dim,delta,m0,dominant_term`.
std::string curve_csv(std::span<const CurveRow> rows);

/// n points logarithmically spaced in [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace driftpac::bounds
