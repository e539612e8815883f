#include <gtest/gtest.h>

#include "ffem/config.hpp"

using namespace ffem;

namespace {

const char* kReference = R"(# reference configuration
[geometry]
length = 24.53e-3
width = 6.4e-3
thickness = 0.14e-3

[patch]
x0 = 0.0
length = 24.53e-3
thickness = 0.05e-3

[materials]
substrate_modulus = 105e9
piezo_modulus = 60.6e9
e31 = 16.604
a33 = 2.6e-8

[fractional]
alpha = 1.0, 0.9, 0.8, 0.7
horizon = 4.906e-3, 2.453e-3

[mesh]
elements = 500

[loads]
q0 = 1.0

[case]
mode = direct
bc = simply-supported

[outputs]
directory = out
samples_per_element = 10
)";

}  // namespace

TEST(Config, ParsesReferenceFile) {
    StudyConfig c = parse_config(kReference);
    EXPECT_DOUBLE_EQ(c.length, 24.53e-3);
    EXPECT_TRUE(c.has_patch);
    EXPECT_DOUBLE_EQ(c.patch_thickness, 0.05e-3);
    EXPECT_EQ(c.alphas.size(), 4u);
    EXPECT_EQ(c.horizons.size(), 2u);
    EXPECT_EQ(c.elements.front(), 500);
    EXPECT_EQ(c.mode, Mode::Direct);
    EXPECT_EQ(c.bc, BcTag::SimplySupported);
    EXPECT_DOUBLE_EQ(c.loads.q0, 1.0);
    EXPECT_DOUBLE_EQ(c.loads.phi0, 0.0);
    auto m = c.to_model(0.8, c.horizons[0]);
    EXPECT_DOUBLE_EQ(m.frac.alpha_m, 0.8);
    EXPECT_DOUBLE_EQ(m.materials.E_P, 60.6e9);
}

TEST(Config, RoundTripIsIdentity) {
    StudyConfig c = parse_config(kReference);
    std::string s1 = serialize_config(c);
    StudyConfig c2 = parse_config(s1);
    std::string s2 = serialize_config(c2);
    EXPECT_EQ(s1, s2);
}

TEST(Config, MissingFieldNamesTheField) {
    std::string text(kReference);
    auto pos = text.find("e31 = 16.604\n");
    text.erase(pos, std::string("e31 = 16.604\n").size());
    try {
        parse_config(text);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field, "materials.e31");
    }
}

TEST(Config, RejectsBadModeAndGrid) {
    std::string bad_mode(kReference);
    bad_mode.replace(bad_mode.find("mode = direct"), 13, "mode = sideways");
    EXPECT_THROW(parse_config(bad_mode), ConfigError);

    std::string bad_alpha(kReference);
    bad_alpha.replace(bad_alpha.find("alpha = 1.0, 0.9, 0.8, 0.7"), 26, "alpha = 1.5, 0.9, 0.8, 0.7");
    EXPECT_THROW(parse_config(bad_alpha), ConfigError);
}

TEST(Config, EnforcesMinimumDynamicRate) {
    // h_l/l_e >= 1: 500 elements with horizon below one element length fails
    std::string text(kReference);
    text.replace(text.find("horizon = 4.906e-3, 2.453e-3"), 28, "horizon = 1.0e-5");
    EXPECT_THROW(parse_config(text), ConfigError);
}

TEST(Config, NInfListResolvesDensities) {
    std::string text(kReference);
    text.replace(text.find("elements = 500"), 14, "n_inf = 2, 10");
    StudyConfig c = parse_config(text);
    auto densities = c.mesh_densities(c.horizons[1]);  // h_l = L/10
    ASSERT_EQ(densities.size(), 2u);
    EXPECT_EQ(densities[0], 20);
    EXPECT_EQ(densities[1], 100);
}

TEST(Config, DirectModeRequiresPatch) {
    std::string text(kReference);
    auto p0 = text.find("[patch]");
    auto p1 = text.find("[materials]");
    text.erase(p0, p1 - p0);
    EXPECT_THROW(parse_config(text), ConfigError);
}
