#include <gtest/gtest.h>

#include "spatialqt/config.hpp"
#include "spatialqt/error.hpp"

using namespace spatialqt;

namespace {

std::string error_of(const std::string& yaml) {
    try {
        parse_config(yaml);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, DefaultsMatchTheExperiment) {
    const auto c = default_config();
    EXPECT_EQ(c.geometry.d, 0.18e-3);
    EXPECT_EQ(c.geometry.a, 0.045e-3);
    EXPECT_EQ(c.geometry.z_a, 0.2);
    EXPECT_EQ(c.optics.lambda_pump, 413e-9);
    EXPECT_EQ(c.optics.lambda_down, 826e-9);
    EXPECT_NEAR(c.plan_delta(), 1.376e-3, 1e-15);
    EXPECT_EQ(c.weight_a, 0.87);
    EXPECT_NO_THROW(c.validate());
    EXPECT_TRUE(parse_config("") == c);
}

TEST(Config, RoundTripIsIdentity) {
    auto c = default_config();
    EXPECT_TRUE(parse_config(to_yaml(c)) == c);
    c.delta = 1.2e-3;
    c.x_positions = std::array<double, 2>{0.1e-3, 1.3e-3};
    c.seed = 0xffffffffffffull;
    c.noise = NoiseModel::Poisson;
    c.weight_a = 0.1 + 0.2;  // not exactly representable in short form
    c.weight_b = 1.0 - c.weight_a;
    c.output_dir = "some dir/out";
    const auto yaml = to_yaml(c);
    const auto back = parse_config(yaml);
    EXPECT_TRUE(back == c);
    EXPECT_EQ(to_yaml(back), yaml);
}

TEST(Config, SerializedFileIsCommented) {
    const auto yaml = to_yaml(default_config());
    EXPECT_NE(yaml.find("# centre spacing"), std::string::npos);
    EXPECT_NE(yaml.find("z: 0.79970944"), std::string::npos);
}

TEST(Config, PartialOverrides) {
    const auto c = parse_config("mixture:\n  A: 1\n  B: 0\nrun:\n  seed: 9\n");
    EXPECT_EQ(c.weight_a, 1.0);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.geometry.d, 0.18e-3);
}

TEST(Config, UnknownKeysCarryLineNumbers) {
    EXPECT_EQ(error_of("geometry:\n  d: 0.00018\n  width: 3\n"), "geometry.width (line 3): unknown key");
    EXPECT_EQ(error_of("run:\n  seed: 1\nextra: 2\n"), "extra (line 3): unknown key");
}

TEST(Config, TypeAndValueErrorsNameTheField) {
    EXPECT_EQ(error_of("geometry:\n  d: wide\n"), "geometry.d (line 2): wrong type");
    EXPECT_EQ(error_of("measurement:\n  noise: gaussian\n"),
              "measurement.noise (line 2): expected 'multinomial' or 'poisson'");
    EXPECT_EQ(error_of("geometry:\n  a: -1.0e-5\n"), "geometry.a (line 2): slit half-width must be positive");
    EXPECT_EQ(error_of("mixture:\n  A: 0.5\n"), "mixture.B: A + B must equal 1");
    EXPECT_NE(error_of("pump:\n  arm1:\n    width: 0.001\n").find("pump.arm1.width (line 3)"), std::string::npos);
    EXPECT_NE(error_of("plan:\n  y_positions: [0, 0.0001]\n").find("plan.y_positions"), std::string::npos);
    EXPECT_NE(error_of("plan:\n  x_positions: [0, 0.006]\n").find("outside quadrature.window"), std::string::npos);
    EXPECT_NE(error_of("geometry: [1, 2\n").find("line"), std::string::npos);
    EXPECT_NE(error_of("measurement:\n  counts_per_setting: 0\n").find("measurement.counts_per_setting (line 2)"),
              std::string::npos);
}

TEST(Config, LoadFromMissingFile) { EXPECT_THROW(load_config("/nonexistent/config.yaml"), ValidationError); }

TEST(Config, ShippedDefaultFileMatches) {
    const auto c = load_config(std::string(SPATIALQT_TEST_DATA) + "/../../config/default.yaml");
    EXPECT_TRUE(c == default_config());
}
