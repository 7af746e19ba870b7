#include <gtest/gtest.h>

#include <sstream>

#include "saferl/config.hpp"

using namespace saferl;

TEST(Config, DefaultsValidate) {
    SimConfig cfg;
    EXPECT_NO_THROW(validate_config(cfg));
}

TEST(Config, ParseOverrides) {
    SimConfig cfg;
    std::istringstream in(
        "# comment\n"
        "dt = 0.05\n"
        "episodes = 42   # trailing comment\n"
        "variant = both\n"
        "dynamic_shield = true\n"
        "\n");
    apply_config_text(cfg, in);
    EXPECT_DOUBLE_EQ(cfg.dt, 0.05);
    EXPECT_EQ(cfg.episodes, 42);
    EXPECT_EQ(cfg.variant, "both");
    EXPECT_TRUE(cfg.dynamic_shield);
}

TEST(Config, UnknownKeyNamesTheKey) {
    SimConfig cfg;
    std::istringstream in("no_such_key = 1\n");
    try {
        apply_config_text(cfg, in);
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("no_such_key"), std::string::npos);
    }
}

TEST(Config, BadValueRejected) {
    SimConfig cfg;
    std::istringstream in("dt = fast\n");
    EXPECT_THROW(apply_config_text(cfg, in), std::invalid_argument);
}

TEST(Config, SnapshotRoundTrips) {
    SimConfig cfg;
    cfg.dt = 0.125;
    cfg.episodes = 777;
    cfg.variant = "none";
    std::string snap = config_snapshot(cfg);

    SimConfig other;
    std::istringstream in(snap);
    apply_config_text(other, in);
    EXPECT_EQ(config_snapshot(other), snap);
    EXPECT_EQ(config_hash(other), config_hash(cfg));
}

TEST(Config, HashChangesWithContent) {
    SimConfig a, b;
    b.gamma = 0.95;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 40u);
}

TEST(Config, ValidateCatchesBadRanges) {
    SimConfig cfg;
    cfg.gamma = 1.5;
    EXPECT_THROW(validate_config(cfg), std::invalid_argument);
    cfg = SimConfig{};
    cfg.batch_size = 31;
    EXPECT_THROW(validate_config(cfg), std::invalid_argument);
    cfg = SimConfig{};
    cfg.traffic_max = 9;
    EXPECT_THROW(validate_config(cfg), std::invalid_argument);
}

TEST(Config, Sha1KnownVectors) {
    EXPECT_EQ(sha1_hex(""), "da39a3ee5e6b4b0d3255bfef95601890afd80709");
    EXPECT_EQ(sha1_hex("abc"), "a9993e364706816aba3e25717850c26c9cd0d89d");
    // git hash-object of an empty file
    EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}
