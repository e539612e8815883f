#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ffem/config.hpp"
#include "ffem/studies.hpp"

using namespace ffem;

namespace {

StudyConfig small_config() {
    StudyConfig c;
    c.length = 24.53e-3;
    c.width = 6.4e-3;
    c.thickness = 0.14e-3;
    c.has_patch = true;
    c.patch_x0 = 0.0;
    c.patch_length = c.length;
    c.patch_thickness = 0.05e-3;
    c.substrate_modulus = 105e9;
    c.piezo_modulus = 60.6e9;
    c.e31 = 16.604;
    c.a33 = 2.6e-8;
    c.alphas = {1.0, 0.8};
    c.horizons = {c.length / 5.0};
    c.elements = {30};
    c.loads.q0 = 1.0;
    c.mode = Mode::Direct;
    c.bc = BcTag::SimplySupported;
    return c;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Studies, RunCaseWritesProfilesAndMetrics) {
    auto cfg = small_config();
    std::string dir = "test_out_run";
    std::filesystem::remove_all(dir);
    int rc = run_case(cfg, dir);
    EXPECT_EQ(rc, 0);
    EXPECT_TRUE(std::filesystem::exists(dir + "/metrics.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir + "/profile_case000.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir + "/profile_case001.csv"));
    std::string metrics = slurp(dir + "/metrics.csv");
    EXPECT_NE(metrics.find(metrics_header()), std::string::npos);
    EXPECT_NE(metrics.find("ok"), std::string::npos);
    std::string profile = slurp(dir + "/profile_case000.csv");
    EXPECT_EQ(profile.substr(0, 14), "x,u0,w0,phi0\n0");
    std::filesystem::remove_all(dir);
}

TEST(Studies, SweepIsDeterministicAcrossThreadCounts) {
    auto cfg = small_config();
    auto rows1 = parametric_sweep(cfg, 4, 1);
    auto rows4 = parametric_sweep(cfg, 4, 4);
    ASSERT_EQ(rows1.size(), rows4.size());
    std::ostringstream a, b;
    for (const auto& r : rows1) a << metrics_line(r) << '\n';
    for (const auto& r : rows4) b << metrics_line(r) << '\n';
    EXPECT_EQ(a.str(), b.str());
    // grid ordering: alpha outer, horizon inner
    EXPECT_DOUBLE_EQ(rows1[0].alpha, 1.0);
    EXPECT_DOUBLE_EQ(rows1[1].alpha, 0.8);
}

TEST(Studies, SweepRecordsPerRowFailures) {
    auto cfg = small_config();
    cfg.horizons = {cfg.length / 5.0, 2.0 * cfg.length};  // second horizon invalid
    auto rows = parametric_sweep(cfg, 4, 1);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].status, "ok");
    EXPECT_NE(rows[1].status.find("error"), std::string::npos);
    EXPECT_EQ(rows[2].status, "ok");
}

TEST(Studies, ConvergenceStudyFlagsFirstDensityUnderOnePercent) {
    auto cfg = small_config();
    cfg.elements.clear();
    cfg.n_inf = {2, 5, 10, 20};
    auto res = convergence_study(cfg, 0.8, cfg.horizons[0]);
    ASSERT_EQ(res.rows.size(), 4u);
    ASSERT_TRUE(res.converged_n_inf.has_value());
    EXPECT_LE(*res.converged_n_inf, 10.0);
    cfg.n_inf = {10};
    EXPECT_THROW(convergence_study(cfg, 0.8, cfg.horizons[0]), ConfigError);
}

TEST(Studies, MetricsFormattingFixedPrecision) {
    MetricsRow r;
    r.alpha = 0.8;
    r.h_l = 24.53e-3 / 5.0;
    r.n_elements = 500;
    r.bc = BcTag::Cantilever;
    r.mode = Mode::Direct;
    r.w_max = -1.2345678e-5;
    r.v_rms = 0.90330123;
    EXPECT_EQ(metrics_line(r), "0.8,0.004906,500,cantilever,direct,-1.23457e-05,,0.903301,ok");
}
