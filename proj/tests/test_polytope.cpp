#include "driftpac/polytope.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace driftpac;

namespace {

// {x <= hi_x, -x <= -lo_x, y <= hi_y, -y <= -lo_y}
Polytope box(double lx, double hx, double ly, double hy) {
    return Polytope(Matrix::from_rows({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}), {-hx, lx, -hy, ly});
}

}  // namespace

TEST(Label, UnitBox) {
    const auto p = box(0, 1, 0, 1);
    EXPECT_EQ(label(p, std::vector<double>{0.5, 0.5}), 1);
    EXPECT_EQ(label(p, std::vector<double>{2.0, 0.5}), 0);
    EXPECT_EQ(label(p, std::vector<double>{1.0, 1.0}), 1);
    EXPECT_THROW(label(p, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Label, MaxViolationEquivalenceAndScaling) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int k = 0; k < 200; ++k) {
        const std::size_t nf = 1 + rng() % 5, n = 1 + rng() % 3;
        Matrix A(nf, n);
        std::vector<double> b(nf);
        for (auto& a : A.data) a = g(rng);
        for (auto& v : b) v = g(rng);
        const Polytope p(A, b);
        const double lambda = std::exp(g(rng));
        Matrix As = A;
        for (auto& a : As.data) a *= lambda;
        std::vector<double> bs = b;
        for (auto& v : bs) v *= lambda;
        const Polytope ps(As, bs);
        for (int q = 0; q < 20; ++q) {
            std::vector<double> x(n);
            for (auto& v : x) v = g(rng);
            EXPECT_EQ(label(p, x), p.max_violation(x) <= 0.0 ? 1 : 0);
            EXPECT_EQ(label(p, x), label(ps, x));
        }
    }
}

TEST(BigM, Examples) {
    const BoxDomain X({0, 0}, {1, 1});
    const auto m = big_m_bounds(X, CoeffBox::uniform(1, 2, 1.0, 1.0));
    EXPECT_EQ(m.upper[0], 3.0);
    EXPECT_EQ(m.lower[0], -3.0);

    // a = (1, 0), b = 0: exact range [0, 1]; the lower end is widened
    const std::vector<double> lo{0.0}, hi{0.0};
    const auto fixed = big_m_bounds(X, CoeffBox::fixed_normals(Matrix::from_rows({{1, 0}}), lo, hi), 1.0);
    EXPECT_EQ(fixed.upper[0], 1.0);
    EXPECT_EQ(fixed.lower[0], -1.0);
    const auto wide = big_m_bounds(X, CoeffBox::fixed_normals(Matrix::from_rows({{1, 0}}), lo, hi), 0.25);
    EXPECT_EQ(wide.lower[0], -0.25);

    const BoxDomain point({0, 0, 0}, {0, 0, 0});
    const auto pm = big_m_bounds(point, CoeffBox::uniform(2, 3, 1.0, 2.0));
    EXPECT_EQ(pm.upper[1], 2.0);
    EXPECT_EQ(pm.lower[1], -2.0);
}

TEST(BigM, MatchesCornerEnumeration) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 300; ++k) {
        const std::size_t n = 1 + rng() % 4;
        std::vector<double> xl(n), xh(n);
        for (std::size_t i = 0; i < n; ++i) {
            xl[i] = u(rng);
            xh[i] = xl[i] + std::fabs(u(rng));
        }
        CoeffBox c;
        c.lower.assign(1, std::vector<double>(n + 1));
        c.upper.assign(1, std::vector<double>(n + 1));
        for (std::size_t i = 0; i <= n; ++i) {
            c.lower[0][i] = -std::fabs(u(rng)) - 0.01;
            c.upper[0][i] = std::fabs(u(rng)) + 0.01;
        }
        const BoxDomain X(xl, xh);
        const auto m = big_m_bounds(X, c);
        const auto [sup, inf] = oracle::corner_range(xl, xh, c.lower[0], c.upper[0]);
        EXPECT_NEAR(m.upper[0], sup, 1e-12 * (1 + std::fabs(sup)));
        EXPECT_NEAR(m.lower[0], inf, 1e-12 * (1 + std::fabs(inf)));
        EXPECT_GT(m.upper[0], 0.0);
        EXPECT_LT(m.lower[0], 0.0);

        // random interior draws stay inside [m, M]
        std::mt19937_64 r2(k);
        std::uniform_real_distribution<double> t(0.0, 1.0);
        for (int q = 0; q < 20; ++q) {
            double v = c.lower[0][n] + t(r2) * (c.upper[0][n] - c.lower[0][n]);
            for (std::size_t i = 0; i < n; ++i) {
                const double a = c.lower[0][i] + t(r2) * (c.upper[0][i] - c.lower[0][i]);
                const double x = xl[i] + t(r2) * (xh[i] - xl[i]);
                v += a * x;
            }
            EXPECT_LE(v, m.upper[0] + 1e-12);
            EXPECT_GE(v, m.lower[0] - 1e-12);
        }
    }
}

TEST(CoeffBox, OriginInterior) {
    EXPECT_TRUE(CoeffBox::uniform(2, 2, 1.0, 5.0).origin_interior());
    const std::vector<double> lo{-1.0}, hi{1.0};
    EXPECT_FALSE(CoeffBox::fixed_normals(Matrix::from_rows({{1, 0}}), lo, hi).origin_interior());
}

TEST(Volume, Examples) {
    EXPECT_NEAR(volume_surrogate(box(0, 1, 0, 1), VolumeMode::Exact2D), 1.0, 1e-12);
    EXPECT_NEAR(volume_surrogate(box(0, 2, 0, 3), VolumeMode::Exact2D), 6.0, 1e-12);
    EXPECT_NEAR(oracle::polygon_area(box(0, 2, 0, 3)), 6.0, 1e-12);
    EXPECT_EQ(volume_surrogate(box(0, 1, 0, 1), VolumeMode::OffsetSum), 2.0);
}

TEST(Volume, UnboundedAndEmpty) {
    const Polytope half(Matrix::from_rows({{1, 0}}), {-1});
    EXPECT_THROW(volume_surrogate(half, VolumeMode::Exact2D), std::domain_error);
    EXPECT_EQ(volume_surrogate(half, VolumeMode::OffsetSum), 1.0);
    EXPECT_EQ(volume_surrogate(box(2, 1, 0, 1), VolumeMode::Exact2D), 0.0);
}

TEST(Volume, RandomPolygonsMatchShoelaceOracle) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI), off(0.5, 3.0);
    for (int k = 0; k < 200; ++k) {
        // tangent lines to circles around the origin: always bounded when the
        // normals span all directions, so add the four axis facets too
        std::vector<std::vector<double>> rows{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        std::vector<double> b{-4, -4, -4, -4};
        const int extra = static_cast<int>(rng() % 6);
        for (int q = 0; q < extra; ++q) {
            const double t = ang(rng);
            rows.push_back({std::cos(t), std::sin(t)});
            b.push_back(-off(rng));
        }
        const Polytope p(Matrix::from_rows(rows), b);
        EXPECT_NEAR(volume_surrogate(p, VolumeMode::Exact2D), oracle::polygon_area(p), 1e-9);
    }
}

TEST(RotatedBox, RowsAndRoundTrip) {
    const double t = 0.3;
    const auto A = rotated_box_normals(t);
    ASSERT_EQ(A.rows, 4u);
    EXPECT_DOUBLE_EQ(A(0, 0), std::cos(t));
    EXPECT_DOUBLE_EQ(A(1, 0), -std::sin(t));
    EXPECT_DOUBLE_EQ(A(2, 1), -std::sin(t));
    EXPECT_DOUBLE_EQ(A(3, 1), -std::cos(t));
    const Polytope p(A, {-1, -2, -3, -4});
    EXPECT_EQ(polytope_from_json(to_json(p)), p);
    EXPECT_EQ(to_json(p).dump(), to_json(polytope_from_json(nlohmann::json::parse(to_json(p).dump()))).dump());
}

TEST(Json, RejectsMalformed) {
    EXPECT_ANY_THROW(polytope_from_json(nlohmann::json::parse(R"({"A": [[1, 0]]})")));
    EXPECT_ANY_THROW(polytope_from_json(nlohmann::json::parse(R"({"A": [[1, 0], [1]], "b": [0, 0]})")));
    EXPECT_ANY_THROW(polytope_from_json(nlohmann::json::parse(R"({"A": [[1, 0]], "b": [0, 1]})")));
}
