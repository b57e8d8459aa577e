#include "driftpac/drift_sim.hpp"
#include "driftpac/validate.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace driftpac;

namespace {

// Unit box [0,1]^2 as a polytope.
Polytope unit_box() { return Polytope(Matrix::from_rows({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}), {-1, -1, 0, 0}); }

PointSampler square(double lo, double hi) {
    return [lo, hi](Rng& rng) {
        std::uniform_real_distribution<double> u(lo, hi);
        const double a = u(rng);
        return std::vector<double>{a, u(rng)};
    };
}

ValidationOptions small(std::int64_t runs, std::int64_t per_run) {
    ValidationOptions o;
    o.runs = runs;
    o.samples_per_run = per_run;
    o.seed = 77;
    return o;
}

}  // namespace

TEST(Histogram, TwoBins) {
    const std::vector<double> v{0.0, 0.0, 1.0};
    const auto h = histogram(v, 2, std::pair{0.0, 1.0});
    EXPECT_EQ(h.counts, (std::vector<std::int64_t>{2, 1}));
    EXPECT_EQ(h.edges, (std::vector<double>{0.0, 0.5, 1.0}));
    EXPECT_EQ(histogram(v, 2).counts, (std::vector<std::int64_t>{2, 1}));
}

TEST(Histogram, ConstantValuesFillOneBin) {
    const std::vector<double> v(17, 0.25);
    const auto h = histogram(v, 5);
    EXPECT_EQ(std::count_if(h.counts.begin(), h.counts.end(), [](auto c) { return c != 0; }), 1);
    EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::int64_t{0}), 17);
}

TEST(Histogram, CountsPartitionValues) {
    Rng rng(4);
    std::uniform_real_distribution<double> u(-3.0, 8.0);
    std::vector<double> v(500);
    for (auto& x : v) x = u(rng);
    for (int bins : {1, 7, 30}) {
        const auto h = histogram(v, bins);
        EXPECT_EQ(h.edges.size(), static_cast<std::size_t>(bins) + 1);
        EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::int64_t{0}), 500);
    }
    const auto clipped = histogram(v, 4, std::pair{0.0, 1.0});
    EXPECT_EQ(std::accumulate(clipped.counts.begin(), clipped.counts.end(), std::int64_t{0}), 500);
}

TEST(Histogram, Errors) {
    const std::vector<double> none;
    EXPECT_THROW(histogram(none, 3), std::invalid_argument);
    const std::vector<double> one{1.0};
    EXPECT_THROW(histogram(one, 0), std::invalid_argument);
    EXPECT_THROW(histogram(one, 2, std::pair{1.0, 1.0}), std::invalid_argument);
}

TEST(Histogram, Csv) {
    const std::vector<double> v{0.0, 0.0, 1.0};
    EXPECT_EQ(histogram_csv(histogram(v, 2)), "bin_lo,bin_hi,count\n0,0.5,2\n0.5,1,1\n");
}

TEST(Validate, IdenticalHypothesisHasNoDisagreement) {
    const auto box = unit_box();
    const StaticProcess proc([box](std::span<const double> x) { return label(box, x); }, square(-1.0, 2.0));
    const auto r = monte_carlo_validate(box, proc, small(20, 300));
    EXPECT_EQ(r.mean, 0.0);
    EXPECT_EQ(r.max, 0.0);
    EXPECT_EQ(r.exceed_count, 0);
    EXPECT_TRUE(r.within_limit());
}

TEST(Validate, ComplementHypothesisDisagreesEverywhere) {
    const auto box = unit_box();
    const StaticProcess proc([box](std::span<const double> x) { return 1 - label(box, x); }, square(-1.0, 2.0));
    const auto r = monte_carlo_validate(box, proc, small(20, 300));
    EXPECT_EQ(r.mean, 1.0);
    EXPECT_EQ(r.min, 1.0);
    EXPECT_EQ(r.exceed_count, 20);
    EXPECT_FALSE(r.within_limit());
}

TEST(Validate, ReportInvariants) {
    const Polytope half(Matrix::from_rows({{1, 0}}), {-0.5});
    const auto box = unit_box();
    const StaticProcess proc([box](std::span<const double> x) { return label(box, x); }, square(-1.0, 2.0));
    auto o = small(60, 500);
    o.bins = 12;
    const auto r = monte_carlo_validate(half, proc, o);
    ASSERT_EQ(r.per_run.size(), 60u);
    for (double e : r.per_run) {
        EXPECT_GE(e, 0.0);
        EXPECT_LE(e, 1.0);
    }
    EXPECT_EQ(r.mean, r.mean_streaming);
    EXPECT_EQ(std::accumulate(r.hist.counts.begin(), r.hist.counts.end(), std::int64_t{0}), 60);
    EXPECT_EQ(r.hist.counts.size(), 12u);
    EXPECT_DOUBLE_EQ(r.bound_value, 4 * 0.02 + 0.01);
    // P(H) + P(B) - 2 P(H and B) over [-1,2]^2
    EXPECT_NEAR(r.mean, 0.5 + 1.0 / 9.0 - 2.0 / 18.0, 0.01);
    EXPECT_FALSE(r.note.empty());
}

TEST(Validate, DeterministicAndThreadIndependent) {
    const aeb::AebParams p;
    const aeb::AebTarget last{p.mass0, p.force0};
    const AebProcess proc(p, last);
    const Polytope h(Matrix::from_rows({p.effective_direction()}), {0.0});
    auto o = small(40, 400);
    const auto a = monte_carlo_validate(h, proc, o);
    const auto b = monte_carlo_validate(h, proc, o);
    o.threads = 4;
    const auto c = monte_carlo_validate(h, proc, o);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.counts, c.counts);
    EXPECT_EQ(a.mean, c.mean);
    EXPECT_EQ(c.mean, c.mean_streaming);
    EXPECT_EQ(to_json(a).dump(), to_json(c).dump());
    o.seed = 78;
    EXPECT_NE(monte_carlo_validate(h, proc, o).counts, a.counts);
}

TEST(Validate, RejectsEmptyRuns) {
    const auto box = unit_box();
    const StaticProcess proc([box](std::span<const double> x) { return label(box, x); }, square(0.0, 1.0));
    EXPECT_THROW(monte_carlo_validate(box, proc, small(0, 10)), std::invalid_argument);
    EXPECT_THROW(monte_carlo_validate(box, proc, small(10, 0)), std::invalid_argument);
}
