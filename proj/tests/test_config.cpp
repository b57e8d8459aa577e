#include "driftpac/config.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace driftpac;

TEST(Config, DefaultsMatchBrakingExample) {
    const auto c = parse_config("");
    EXPECT_EQ(c.bound.epsilon, 0.01);
    EXPECT_EQ(c.bound.delta, 1e-6);
    EXPECT_EQ(c.bound.mu_min, 0.0078);
    EXPECT_EQ(c.bound.mu_max, 0.02);
    EXPECT_EQ(c.bound.vc_dim, 1);
    EXPECT_EQ(c.facets, 4u);
    EXPECT_EQ(c.runs, 500);
    EXPECT_EQ(c.samples_per_run, 5000);
    EXPECT_EQ(c.m, 0);
}

TEST(Config, SerializeRoundTrip) {
    auto c = parse_config("epsilon = 0.02\nseed = 99\nsolver = bnb\nfacets = 1\nrho = 3.5e-7\n");
    EXPECT_EQ(c.bound.epsilon, 0.02);
    EXPECT_EQ(c.seed, 99u);
    EXPECT_EQ(c.solver, SolverKind::BranchAndBound);
    const auto text = serialize_config(c);
    const auto back = parse_config(text);
    EXPECT_EQ(back, c);
    EXPECT_EQ(serialize_config(back), text);
}

TEST(Config, EveryKeyIsSerialized) {
    const auto text = serialize_config(RunConfig{});
    for (const auto& k : config_keys()) {
        if (k.name == "v_mean_kmh" || k.name == "v_std_kmh") continue;
        EXPECT_NE(text.find(k.name + " = "), std::string::npos) << k.name;
    }
}

TEST(Config, SpeedsInKmhAreConverted) {
    const auto c = parse_config("v_mean_kmh = 36\nv_std_kmh = 18\n");
    EXPECT_DOUBLE_EQ(c.aeb.v2_mean, 100.0);
    EXPECT_DOUBLE_EQ(c.aeb.v2_std, 25.0);
}

TEST(Config, CommentsAndWhitespace) {
    const auto c = parse_config("# header\n\n  runs =  12   # trailing\n\tbins=4\n");
    EXPECT_EQ(c.runs, 12);
    EXPECT_EQ(c.bins, 4);
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(parse_config("nonsense = 1\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("runs = 1\nruns = 2\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("runs = many\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("epsilon\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("epsilon = 1.5\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("mu_max = 0.3\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("facets = 3\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("solver = cplex\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("epsilon = nan\n"), std::invalid_argument);
}

TEST(Config, ErrorsNameTheLine) {
    try {
        parse_config("runs = 3\n\nbogus = 1\n");
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Config, MuMinMayBeZeroWhenMIsGiven) {
    EXPECT_THROW(parse_config("mu_min = 0\n"), std::invalid_argument);
    const auto c = parse_config("mu_min = 0\nmu_max = 0\nm = 200\n");
    EXPECT_EQ(c.m, 200);
}

TEST(Config, SetValueAndJson) {
    RunConfig c;
    set_config_value(c, "threads", "3");
    EXPECT_EQ(c.threads, 3u);
    EXPECT_THROW(set_config_value(c, "nope", "1"), std::invalid_argument);
    const auto j = to_json(c);
    EXPECT_EQ(j.at("threads"), 3);
    EXPECT_EQ(j.at("solver"), "auto");
}
