#include <gtest/gtest.h>

#include "ffem/model.hpp"

using namespace ffem;

TEST(SectionConstantsTest, PaperGeometryValues) {
    auto m = presets::layer_beam();
    auto sc = section_constants(m);
    EXPECT_NEAR(sc.A, 6.4e-3 * 0.14e-3, 1e-18);
    EXPECT_NEAR(sc.I, 6.4e-3 * std::pow(0.14e-3, 3) / 12.0, 1e-24);
    EXPECT_NEAR(sc.A_P, 3.2e-7, 1e-13);
    EXPECT_NEAR(sc.B_P, 3.04e-11, 1e-16);
    // I_P from the layer-moment formula
    double b = 6.4e-3, h = 0.14e-3, hP = 0.05e-3;
    double IP = (b / 3.0) * (0.75 * h * h * hP + 1.5 * h * hP * hP + hP * hP * hP);
    EXPECT_NEAR(sc.I_P, IP, 1e-20);
}

TEST(SectionConstantsTest, DegenerateLayerAndMonotonicity) {
    auto m = presets::validation_beam();
    auto sc = section_constants(m);
    EXPECT_EQ(sc.A_P, 0.0);
    EXPECT_EQ(sc.B_P, 0.0);
    EXPECT_EQ(sc.I_P, 0.0);

    double prevB = 0.0, prevI = 0.0;
    for (double hP : {1e-5, 5e-5, 2e-4, 1e-3}) {
        auto mm = presets::layer_beam();
        mm.patch.h_P = hP;
        auto s = section_constants(mm);
        EXPECT_GT(s.B_P, prevB);
        EXPECT_GT(s.I_P, prevI);
        prevB = s.B_P;
        prevI = s.I_P;
    }
}

TEST(ElectrodeConstantsTest, PaperValuesAndDegenerateFilm) {
    auto m = presets::electrode_study_beam(true);
    auto ec = electrode_constants(m);
    EXPECT_NEAR(ec.A_e, 6.4e-8, 1e-14);
    EXPECT_GT(ec.I_e, 0.0);
    EXPECT_GT(ec.B_e, 0.0);

    auto bare = presets::electrode_study_beam(false);
    auto none = electrode_constants(bare);
    EXPECT_EQ(none.A_e, 0.0);

    // zero-thickness films leave the piezo constants at their unshifted values
    auto zero = presets::electrode_study_beam(true);
    zero.electrodes->h_e = 0.0;
    auto sc_zero = section_constants(zero);
    auto sc_bare = section_constants(bare);
    EXPECT_DOUBLE_EQ(sc_zero.B_P, sc_bare.B_P);
    EXPECT_EQ(electrode_constants(zero).I_e, 0.0);
}

TEST(ElectrodeConstantsTest, FilmsShiftPiezoLayerOutward) {
    auto with = presets::electrode_study_beam(true);
    auto without = presets::electrode_study_beam(false);
    auto sw = section_constants(with);
    auto so = section_constants(without);
    EXPECT_DOUBLE_EQ(sw.A_P, so.A_P);
    EXPECT_GT(sw.B_P, so.B_P);
    EXPECT_GT(sw.I_P, so.I_P);
}

TEST(ModelValidation, RejectsBadInputs) {
    auto m = presets::layer_beam();
    EXPECT_NO_THROW(m.validate());
    m.frac.alpha_m = 1.2;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    m.frac.alpha_m = 0.8;
    m.frac.h_l = 2.0 * m.L;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    m.frac.h_l = m.L / 5;
    m.patch.x0 = 0.9 * m.L;
    EXPECT_THROW(m.validate(), std::invalid_argument);
}

TEST(ModelHash, SensitiveToParameters) {
    auto a = presets::layer_beam();
    auto b = presets::layer_beam();
    EXPECT_EQ(a.hash(), b.hash());
    b.frac.alpha_m = 0.9;
    EXPECT_NE(a.hash(), b.hash());
}
