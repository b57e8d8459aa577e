#include "driftpac/drift_sim.hpp"
#include "driftpac/fit.hpp"
#include "driftpac/preprocess.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace driftpac;

namespace {

// Samples on a line: x = (t, 0) with direction (1, 0).
std::vector<LabeledSample> on_line(const std::vector<std::pair<double, int>>& pts) {
    std::vector<LabeledSample> s;
    for (const auto& [t, y] : pts)
        s.push_back({static_cast<std::int64_t>(s.size() + 1), {t, 0.0}, static_cast<std::uint8_t>(y)});
    return s;
}

const std::vector<double> kX{1.0, 0.0};

std::vector<oracle::Proj> to_oracle(std::span<const LabeledSample> s, std::span<const double> d) {
    std::vector<oracle::Proj> p;
    for (const auto& q : s) p.push_back({dot(d, q.x), q.label});
    return p;
}

std::set<std::int64_t> indices(const std::vector<LabeledSample>& s) {
    std::set<std::int64_t> out;
    for (const auto& q : s) out.insert(q.index);
    return out;
}

}  // namespace

TEST(ThresholdOracle, SeparatedLine) {
    const auto r = threshold_oracle(on_line({{1, 1}, {2, 1}, {3, 0}}), kX);
    EXPECT_EQ(r.count, 0);
    ASSERT_EQ(r.optimal.size(), 1u);
    EXPECT_EQ(r.optimal[0].lo, 2.0);
    EXPECT_EQ(r.optimal[0].hi, 3.0);
}

TEST(ThresholdOracle, ReversedPair) {
    const auto s = on_line({{1, 0}, {2, 1}});
    const auto r = threshold_oracle(s, kX);
    EXPECT_EQ(r.count, 1);
    const auto p = project(s, kX);
    EXPECT_EQ(threshold_errors(p, 0.5), 1);
    EXPECT_EQ(threshold_errors(p, 1.5), 2);
    EXPECT_EQ(threshold_errors(p, 2.0), 1);
    ASSERT_EQ(r.optimal.size(), 2u);
    EXPECT_EQ(r.optimal[0].lo, -INFINITY);
    EXPECT_EQ(r.optimal[0].hi, 1.0);
    EXPECT_EQ(r.optimal[1].lo, 2.0);
    EXPECT_EQ(r.optimal[1].hi, INFINITY);
}

TEST(ThresholdOracle, AllOnes) {
    const auto r = threshold_oracle(on_line({{4, 1}, {1, 1}, {2.5, 1}}), kX);
    EXPECT_EQ(r.count, 0);
    ASSERT_EQ(r.optimal.size(), 1u);
    EXPECT_EQ(r.optimal[0].lo, 4.0);
    EXPECT_EQ(r.optimal[0].hi, INFINITY);
}

TEST(ThresholdOracle, MatchesQuadraticOracle) {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> grid(0, 12);
    for (int k = 0; k < 400; ++k) {
        // coarse grid forces ties
        std::vector<std::pair<double, int>> pts;
        const int m = 1 + static_cast<int>(rng() % 25);
        for (int i = 0; i < m; ++i) pts.push_back({grid(rng) * 0.5, static_cast<int>(rng() % 2)});
        const auto s = on_line(pts);
        const auto r = threshold_oracle(s, kX);
        EXPECT_EQ(r.count, oracle::best_threshold(to_oracle(s, kX))) << "instance " << k;
        const auto p = project(s, kX);
        for (const auto& iv : r.optimal) {
            EXPECT_EQ(threshold_errors(p, iv.lo), r.count);
            if (std::isfinite(iv.hi)) EXPECT_GT(threshold_errors(p, iv.hi), r.count);
        }
    }
}

TEST(Discard, MixedExample) {
    const auto s = on_line({{1.0, 1}, {2.0, 1}, {1.5, 0}, {3.0, 0}});
    const auto d = discard_redundant(s, kX);
    EXPECT_EQ(indices(d.kept), (std::set<std::int64_t>{2, 3}));
    EXPECT_EQ(d.report.theta_lo, 1.5);
    EXPECT_EQ(d.report.theta_hi, 2.0);
    EXPECT_EQ(d.report.discarded_I1, 1);
    EXPECT_EQ(d.report.discarded_I0, 1);
    EXPECT_FALSE(d.report.separable);
    EXPECT_EQ(threshold_oracle(s, kX).count, 1);
    EXPECT_EQ(threshold_oracle(d.kept, kX).count, 1);
    EXPECT_EQ(d.report.window.lo, 1.0);
    EXPECT_EQ(d.report.window.hi, 3.0);
}

TEST(Discard, SeparableKeepsBoundaryWitnesses) {
    const auto s = on_line({{0.5, 1}, {1.0, 1}, {2.0, 1}, {4.0, 0}, {5.0, 0}, {7.0, 0}});
    const auto d = discard_redundant(s, kX);
    EXPECT_EQ(indices(d.kept), (std::set<std::int64_t>{3, 4}));
    EXPECT_TRUE(d.report.separable);
    EXPECT_EQ(threshold_oracle(d.kept, kX).count, 0);
}

TEST(Discard, TiesAtTheBoundaryAreKept) {
    const auto s = on_line({{1.0, 1}, {2.0, 1}, {2.0, 0}, {1.0, 0}, {3.0, 0}, {0.5, 1}});
    const auto d = discard_redundant(s, kX);
    EXPECT_EQ(indices(d.kept), (std::set<std::int64_t>{1, 2, 3, 4}));
}

TEST(Discard, OneClassKeepsSingleWitness) {
    const auto s = on_line({{1.0, 0}, {2.0, 0}, {0.5, 0}});
    const auto d = discard_redundant(s, kX);
    ASSERT_EQ(d.kept.size(), 1u);
    EXPECT_FALSE(d.report.warning.empty());
    EXPECT_EQ(threshold_oracle(d.kept, kX).count, threshold_oracle(s, kX).count);
}

TEST(Discard, MultiFacetPassesThrough) {
    const auto s = on_line({{1.0, 1}, {3.0, 0}, {5.0, 0}});
    const auto d = discard_redundant(s, Matrix::from_rows({{1, 0}, {0, 1}}));
    EXPECT_EQ(d.kept, s);
    EXPECT_FALSE(d.report.notice.empty());
    EXPECT_EQ(d.report.kept, 3);
    const auto one = discard_redundant(s, Matrix::from_rows({{1, 0}}));
    EXPECT_EQ(one.kept.size(), 2u);
}

TEST(Discard, DistinctCountsCollapseDuplicates) {
    const auto s = on_line({{1.0, 1}, {1.0, 1}, {0.2, 1}, {0.2, 1}, {0.5, 0}, {2.0, 0}, {2.0, 0}});
    const auto d = discard_redundant(s, kX);
    EXPECT_EQ(d.report.total, 7);
    EXPECT_EQ(d.report.discarded_I1, 2);
    EXPECT_EQ(d.report.discarded_I0, 2);
    EXPECT_EQ(d.report.distinct_total, 4);
    EXPECT_EQ(d.report.distinct_discarded, 2);
}

TEST(Discard, RandomInstancesPreserveOptimum) {
    std::mt19937_64 rng(41);
    int instances = 0;
    for (int k = 0; k < 500; ++k) {
        const int m = 1 + static_cast<int>(rng() % 500);
        const double flip = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
        const auto in = gen::random_threshold_instance(rng, m, flip, 0.0);
        const auto d = discard_redundant(in.samples, in.direction);
        const auto full = threshold_oracle(in.samples, in.direction);
        const auto kept = threshold_oracle(d.kept, in.direction);
        ASSERT_EQ(full.count, kept.count) << "instance " << k;
        ++instances;

        // both class extremes survive
        const auto p = project(in.samples, in.direction);
        const auto kept_idx = indices(d.kept);
        const Projection* top1 = nullptr;
        const Projection* low0 = nullptr;
        for (const auto& q : p) {
            if (q.label == 1 && (!top1 || q.t > top1->t)) top1 = &q;
            if (q.label == 0 && (!low0 || q.t < low0->t)) low0 = &q;
        }
        if (top1 && low0) {
            EXPECT_TRUE(kept_idx.count(top1->index));
            EXPECT_TRUE(kept_idx.count(low0->index));
        }

        // idempotent
        const auto again = discard_redundant(d.kept, in.direction);
        EXPECT_EQ(again.kept, d.kept);

        // every discarded sample is correct at any threshold in the window
        if (d.report.window.lo <= d.report.window.hi && std::isfinite(d.report.window.lo) &&
            std::isfinite(d.report.window.hi)) {
            const double theta = 0.5 * (d.report.window.lo + d.report.window.hi);
            for (const auto& q : p)
                if (!kept_idx.count(q.index)) EXPECT_EQ(q.t <= theta, q.label == 1);
        }
    }
    EXPECT_GE(instances, 500);
}

TEST(Discard, ReportJsonNullsInfiniteWindow) {
    const auto d = discard_redundant(on_line({{1.0, 1}, {2.0, 0}}), kX);
    const auto j = to_json(d.report);
    EXPECT_EQ(j.at("kept"), 2);
    EXPECT_EQ(j.at("discarded_I1"), 0);
    EXPECT_EQ(j.at("discarded_I0"), 0);
    EXPECT_TRUE(j.at("window")[0].is_null());
    EXPECT_TRUE(j.at("window")[1].is_null());
}

TEST(Discard, FullTraceDropsMostSamples) {
    const aeb::AebParams p;
    const auto t = aeb::generate_trace(p, 119237);
    const auto dir = p.effective_direction();
    const auto d = discard_redundant(t.samples, dir, 1e-6);
    EXPECT_GE(d.report.discarded_fraction(), 0.90);
    EXPECT_EQ(threshold_oracle(t.samples, dir).count, threshold_oracle(d.kept, dir).count);
}
