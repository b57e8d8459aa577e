#include "driftpac/bounds.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace driftpac::bounds;

TEST(Hoeffding, DirectFormula) {
    EXPECT_NEAR(hoeffding_tail(2, 1.0), 0.367879441171, 1e-12);
    EXPECT_NEAR(hoeffding_tail(1, 1.0), 0.135335283237, 1e-12);
    EXPECT_NEAR(hoeffding_tail(100, 10.0), 0.135335283237, 1e-12);
}

TEST(Hoeffding, RejectsNonPositive) {
    EXPECT_THROW(hoeffding_tail(0, 1.0), std::domain_error);
    EXPECT_THROW(hoeffding_tail(3, 0.0), std::domain_error);
    EXPECT_THROW(hoeffding_tail(3, -1.0), std::domain_error);
}

TEST(Theorem1, MatchesHighPrecision) {
    EXPECT_EQ(theorem1_bound(0.1, 0.05, 0.0, 2), 819);
    EXPECT_EQ(oracle::theorem1(0.1, 0.05, 0.0, 2), 819);
    EXPECT_LT(theorem1_bound(0.1, 0.05, 0.0, 1), theorem1_bound(0.1, 0.05, 0.0, 2));
    for (double rho : {0.0, 0.05, 0.2, 0.7})
        for (double eps : {0.01, 0.05, 0.3})
            EXPECT_EQ(theorem1_bound(eps, 1e-4, rho, 3), oracle::theorem1(eps, 1e-4, rho, 3)) << rho << " " << eps;
}

TEST(Theorem1, RangeChecks) {
    EXPECT_THROW(theorem1_bound(0.0, 0.1, 0.0, 1), std::domain_error);
    EXPECT_THROW(theorem1_bound(0.1, 1.0, 0.0, 1), std::domain_error);
    EXPECT_THROW(theorem1_bound(0.1, 0.1, 1.0, 1), std::domain_error);
    EXPECT_THROW(theorem1_bound(0.1, 0.1, 0.0, 0), std::domain_error);
}

TEST(M0, BrakingExampleValue) {
    const auto r = m0(0.01, 1e-6, 0.0078, 0.02, 1);
    EXPECT_EQ(r.m0, 119237);
    EXPECT_EQ(r.dominant, DominantTerm::MuMinTerm);
    EXPECT_NEAR(r.mu_min_term, 119236.174708, 1e-5);
    EXPECT_NEAR(r.mu_max_term, 118738.018427, 1e-5);
    EXPECT_LT(r.mu_max_term, r.mu_min_term);

    const auto o = oracle::m0_terms(0.01, 1e-6, 0.0078, 0.02, 1);
    EXPECT_EQ(o.m0, 119237);
    EXPECT_NEAR(r.mu_min_term, o.term1.convert_to<double>(), 1e-8);
    EXPECT_NEAR(r.mu_max_term, o.term2.convert_to<double>(), 1e-8);
}

TEST(M0, GuardsNameTheCondition) {
    try {
        m0(0.01, 1e-6, 0.0078, 0.3, 1);
        FAIL();
    } catch (const std::domain_error& e) {
        EXPECT_NE(std::string(e.what()).find("mu_max < 1/4"), std::string::npos);
    }
    EXPECT_THROW(m0(0.01, 1e-6, 0.0, 0.02, 1), std::domain_error);
    EXPECT_THROW(m0(0.01, 1e-6, 0.03, 0.02, 1), std::domain_error);
}

TEST(M0, FirstTermIgnoresEpsilonAndDimension) {
    const double t = m0(0.2, 1e-6, 0.0078, 0.02, 1).mu_min_term;
    for (double eps : {0.05, 0.1, 0.5})
        for (int d : {1, 2, 5}) EXPECT_EQ(m0(eps, 1e-6, 0.0078, 0.02, d).mu_min_term, t);
    // where term 1 dominates the result is constant in epsilon
    EXPECT_EQ(m0(0.2, 1e-6, 0.0078, 0.02, 1).m0, m0(0.5, 1e-6, 0.0078, 0.02, 1).m0);
    EXPECT_EQ(m0(0.2, 1e-6, 0.0078, 0.02, 1).m0, static_cast<std::int64_t>(std::ceil(t)));
}

TEST(M0, AgreesWithHighPrecisionOnRandomInputs) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 300; ++k) {
        const double eps = 0.001 + 0.5 * u(rng);
        const double delta = std::pow(10.0, -1.0 - 8.0 * u(rng));
        const double mu_max = 0.2499 * u(rng) + 1e-4;
        const double mu_min = mu_max * (0.05 + 0.95 * u(rng));
        const int d = 1 + static_cast<int>(u(rng) * 6);
        const auto o = oracle::m0_terms(eps, delta, mu_min, mu_max, d);
        EXPECT_EQ(m0(eps, delta, mu_min, mu_max, d).m0, o.m0);
    }
}

TEST(M0, Monotonicity) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const double eps = 0.002 + 0.3 * u(rng);
        const double delta = std::pow(10.0, -1.0 - 6.0 * u(rng));
        const double hi = 0.01 + 0.2 * u(rng);
        const double lo = hi * (0.1 + 0.8 * u(rng));
        const int d = 1 + static_cast<int>(u(rng) * 4);
        const auto base = m0(eps, delta, lo, hi, d);
        EXPECT_LE(m0(eps, delta, lo * 1.1, hi, d).m0, base.m0);
        EXPECT_GE(m0(eps, delta, lo, std::min(0.2499, hi * 1.1), d).m0, base.m0);
        EXPECT_GE(m0(eps, delta, lo, hi, d + 1).m0, base.m0);
        EXPECT_GE(m0(eps, delta * 0.5, lo, hi, d).m0, base.m0);
        EXPECT_LE(m0(eps * 1.1, delta, lo, hi, d).mu_max_term, base.mu_max_term);
    }
}

TEST(ConstantTarget, Examples) {
    EXPECT_EQ(constant_target_bound(0.1, 0.05, 2), 819);
    EXPECT_EQ(constant_target_bound(0.5, 0.5, 1), 65);
    EXPECT_NEAR(constant_target_raw(0.5, 0.5, 1), 10.0 * (std::log(8.0) + std::log(80.0)), 1e-12);
    EXPECT_EQ(constant_target_bound(0.01, 1e-6, 1), theorem1_bound(0.01, 1e-6, 0.0, 1));
}

TEST(ConstantTarget, IdentityWithTheorem1) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const double eps = 1e-4 + 0.99 * u(rng);
        const double delta = std::pow(10.0, -12.0 * u(rng)) * 0.999;
        const int d = 1 + static_cast<int>(u(rng) * 20);
        EXPECT_EQ(theorem1_raw(eps, delta, 0.0, d), constant_target_raw(eps, delta, d));
        EXPECT_EQ(theorem1_bound(eps, delta, 0.0, d), constant_target_bound(eps, delta, d));
    }
}

TEST(EmpiricalDisagreement, Examples) {
    using V = std::vector<std::uint8_t>;
    EXPECT_EQ(empirical_disagreement(V{1, 0, 1}, V{1, 0, 1}).empirical, 0.0);
    const auto r = empirical_disagreement(V{1, 0, 1}, V{1, 1, 1});
    EXPECT_EQ(r.count, 1);
    EXPECT_EQ(r.m, 3);
    EXPECT_DOUBLE_EQ(r.empirical, 1.0 / 3.0);
    EXPECT_EQ(empirical_disagreement(V{0, 0}, V{1, 1}).empirical, 1.0);
    EXPECT_THROW(empirical_disagreement(V{0}, V{0, 1}), std::invalid_argument);
    EXPECT_THROW(empirical_disagreement(V{}, V{}), std::invalid_argument);
}

TEST(EmpiricalDisagreement, SymmetryRangeTriangle) {
    std::mt19937_64 rng(5);
    std::bernoulli_distribution coin(0.4);
    for (int k = 0; k < 300; ++k) {
        const std::size_t m = 1 + rng() % 40;
        std::vector<std::uint8_t> a(m), b(m), c(m);
        for (std::size_t i = 0; i < m; ++i) {
            a[i] = coin(rng);
            b[i] = coin(rng);
            c[i] = coin(rng);
        }
        const auto ab = empirical_disagreement(a, b), ba = empirical_disagreement(b, a);
        EXPECT_EQ(ab.count, ba.count);
        EXPECT_GE(ab.empirical, 0.0);
        EXPECT_LE(ab.empirical, 1.0);
        EXPECT_LE(empirical_disagreement(a, c).count, ab.count + empirical_disagreement(b, c).count);
    }
}

TEST(Curve, StructureAndCsv) {
    const std::vector<MuPair> pairs{{0.005, 0.02}, {0.01, 0.05}, {0.02, 0.1}};
    const auto grid = log_grid(1e-3, 0.1, 40);
    ASSERT_EQ(grid.size(), 40u);
    EXPECT_DOUBLE_EQ(grid.front(), 1e-3);
    EXPECT_DOUBLE_EQ(grid.back(), 0.1);
    const auto rows = bound_curve(1e-6, pairs, 4, grid);
    ASSERT_EQ(rows.size(), 120u);
    for (std::size_t p = 0; p < pairs.size(); ++p)
        for (std::size_t k = 1; k < grid.size(); ++k) {
            const auto& prev = rows[p * grid.size() + k - 1];
            const auto& cur = rows[p * grid.size() + k];
            if (prev.dominant == DominantTerm::MuMinTerm && cur.dominant == DominantTerm::MuMinTerm)
                EXPECT_EQ(prev.m0, cur.m0);
            if (prev.dominant == DominantTerm::MuMaxTerm && cur.dominant == DominantTerm::MuMaxTerm)
                EXPECT_GT(prev.m0, cur.m0);
        }
    const auto csv = curve_csv(rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "epsilon,mu_min,mu_max,vc_dim,delta,m0,dominant_term");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 121);
}
