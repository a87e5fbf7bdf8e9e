#include "prunebound/config.hpp"
#include "prunebound/errors.hpp"

#include <gtest/gtest.h>

using namespace prunebound;
using nlohmann::json;

TEST(Config, DefaultsAndAuto) {
    const ExperimentConfig c = config_from_json(json::parse(R"({"prune": {"d": "auto", "psi": "estimate"},
        "sketch": {"degree": null}, "budget": {"gamma": "auto"}})"));
    EXPECT_FALSE(c.prune.d.has_value());
    EXPECT_FALSE(c.prune.psi.has_value());
    EXPECT_FALSE(c.sketch.degree.has_value());
    EXPECT_FALSE(c.budget.gamma.has_value());
    EXPECT_EQ(c.model.hidden, 128u);
    EXPECT_EQ(c.model.depth, 5u);
}

TEST(Config, ExplicitValues) {
    const ExperimentConfig c = config_from_json(
        json::parse(R"({"prune": {"d": 2.5, "psi": 0.3}, "sketch": {"degree": 7}, "seed": 11})"));
    EXPECT_EQ(*c.prune.d, 2.5);
    EXPECT_EQ(*c.prune.psi, 0.3);
    EXPECT_EQ(*c.sketch.degree, 7u);
    EXPECT_EQ(c.seed, 11u);
}

TEST(Config, RejectsUnknownKeysAndBadTypes) {
    EXPECT_THROW(config_from_json(json::parse(R"({"modle": {}})")), ValidationError);
    EXPECT_THROW(config_from_json(json::parse(R"({"model": {"hiden": 3}})")), ValidationError);
    EXPECT_THROW(config_from_json(json::parse(R"({"model": {"hidden": "big"}})")), ValidationError);
    EXPECT_THROW(config_from_json(json::parse(R"({"budget": {"delta": 1.5}})")), ValidationError);
    EXPECT_THROW(config_from_json(json::parse(R"([1, 2])")), ValidationError);
}

TEST(Config, RoundTripAndHash) {
    ExperimentConfig c = config_from_json(json::parse(R"({"model": {"hidden": 64}, "prune": {"d": 3}})"), "/base");
    const ExperimentConfig back = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(back), config_to_json(c));
    EXPECT_EQ(config_hash(back), config_hash(c));
    EXPECT_EQ(config_hash(c).size(), 16u);

    ExperimentConfig moved = c;
    moved.out_dir = "/elsewhere";
    EXPECT_EQ(config_hash(moved), config_hash(c));
    ExperimentConfig reseeded = c;
    reseeded.seed += 1;
    EXPECT_NE(config_hash(reseeded), config_hash(c));
}

TEST(Config, RelativePathsResolveAgainstBase) {
    const ExperimentConfig c =
        config_from_json(json::parse(R"({"data": {"train_images": "d/x"}, "out_dir": "o"})"), "/cfgdir");
    EXPECT_EQ(c.data.train_images, std::filesystem::path("/cfgdir/d/x"));
    EXPECT_EQ(c.out_dir, std::filesystem::path("/cfgdir/o"));
}

TEST(Config, Fnv1aKnownValues) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}
