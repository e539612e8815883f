#include <gtest/gtest.h>

#include <cmath>

#include "ffem/post.hpp"
#include "ffem/solve.hpp"

using namespace ffem;

namespace {

Solution zero_solution(const SmartBeamModel& model, const Mesh1D& mesh, Mode mode, Loads loads) {
    Solution sol;
    sol.u_g = Eigen::VectorXd::Zero(mesh.n_nodes());
    sol.w_g = Eigen::VectorXd::Zero(2 * mesh.n_nodes());
    if (mode == Mode::Direct && mesh.patch())
        sol.phi_g = Eigen::VectorXd::Zero(mesh.patch()->n_elements + 1);
    sol.meta.model_hash = model.hash();
    sol.meta.alpha = model.frac.alpha_m;
    sol.meta.h_l = model.frac.h_l;
    sol.meta.n_elements = mesh.n_elements();
    sol.meta.mode = mode;
    sol.meta.bc = model.bc;
    sol.meta.loads = loads;
    return sol;
}

}  // namespace

TEST(EvaluateFields, ZeroSolutionGivesZeroFields) {
    auto model = presets::layer_beam();
    model.frac = {0.8, 0.8, model.L / 5.0};
    auto mesh = build_mesh(model.L, 20, {{0.0, model.L}});
    auto sol = zero_solution(model, mesh, Mode::Direct, Loads{});
    auto prof = evaluate_fields(sol, model, mesh, {0.0, model.L / 3, model.L});
    for (std::size_t i = 0; i < prof.x.size(); ++i) {
        EXPECT_EQ(prof.u0[i], 0.0);
        EXPECT_EQ(prof.w0[i], 0.0);
        EXPECT_EQ(prof.N[i], 0.0);
        EXPECT_EQ(prof.M[i], 0.0);
        EXPECT_EQ(prof.P3[i], 0.0);
    }
    EXPECT_THROW(evaluate_fields(sol, model, mesh, {2.0 * model.L}), std::domain_error);
}

TEST(EvaluateFields, ClassicalMidspanDeflection) {
    auto model = presets::validation_beam();
    model.bc = BcTag::SimplySupported;
    model.frac = {1.0, 1.0, model.L / 5.0};
    auto mesh = build_mesh(model.L, 100);
    Loads loads;
    loads.q0 = 100.0;
    Solution sol = solve_converse(model, mesh, loads);
    auto prof = evaluate_fields(sol, model, mesh, {model.L / 2});
    auto sc = section_constants(model);
    double expect = 5.0 * loads.q0 * std::pow(model.L, 4) / (384.0 * model.materials.E_S * sc.I);
    EXPECT_NEAR(prof.w0[0], expect, 1e-3 * expect);
}

TEST(EvaluateFields, PrescribedPotentialElectricResultant) {
    auto model = presets::layer_beam();
    model.frac = {0.8, 0.8, model.L / 5.0};
    auto mesh = build_mesh(model.L, 20, {{0.0, model.L}});
    Loads loads;
    loads.phi0 = 70.0;
    auto sol = zero_solution(model, mesh, Mode::Converse, loads);
    auto sc = section_constants(model);
    double expect = -model.materials.a33 * sc.A_P * loads.phi0 / model.patch.h_P;
    auto prof = evaluate_fields(sol, model, mesh, {0.2 * model.L, 0.5 * model.L, 0.8 * model.L});
    for (double p3 : prof.P3) EXPECT_NEAR(p3, expect, 1e-12 * std::abs(expect));
}

TEST(NormalizedMidspan, LocalUnityAndScaleInvariance) {
    auto model = presets::validation_beam();
    model.frac = {1.0, 1.0, model.L / 5.0};
    auto mesh = build_mesh(model.L, 100);
    Loads loads;
    loads.q0 = 100.0;
    Solution sol = solve_converse(model, mesh, loads);
    double wbar = normalized_midspan(sol, model, mesh, loads.q0);
    EXPECT_NEAR(wbar, 1.0, 1e-9);

    Loads loads10;
    loads10.q0 = 1000.0;
    Solution sol10 = solve_converse(model, mesh, loads10);
    double wbar10 = normalized_midspan(sol10, model, mesh, loads10.q0);
    EXPECT_NEAR(wbar, wbar10, 1e-12);

    EXPECT_THROW(normalized_midspan(sol, model, mesh, 0.0), std::invalid_argument);
}

TEST(RmsVoltage, DefinitionAndErrors) {
    auto model = presets::layer_beam();
    model.frac = {0.8, 0.8, model.L / 5.0};
    auto mesh = build_mesh(model.L, 10, {{0.0, model.L}});
    auto sol = zero_solution(model, mesh, Mode::Direct, Loads{});
    EXPECT_EQ(rms_voltage(sol), 0.0);
    sol.phi_g = Eigen::VectorXd::Constant(11, 3.0);
    EXPECT_NEAR(rms_voltage(sol), 3.0, 1e-14);  // layer: patch nodes == mesh nodes

    auto noPhi = zero_solution(model, mesh, Mode::Converse, Loads{});
    EXPECT_THROW(rms_voltage(noPhi), std::logic_error);
}

TEST(RmsVoltage, PatchNumeratorTotalNodeDenominator) {
    auto model = presets::patch_beam();
    model.frac = {0.8, 0.8, model.L / 5.0};
    auto mesh = build_mesh(model.L, 20, {{model.patch.x0, model.patch.length}});
    auto sol = zero_solution(model, mesh, Mode::Direct, Loads{});
    ASSERT_EQ(sol.phi_g.size(), 7);  // 6 patch elements + 1
    sol.phi_g.setConstant(2.0);
    // sqrt(7 * 4 / 21)
    EXPECT_NEAR(rms_voltage(sol), std::sqrt(28.0 / 21.0), 1e-14);
}

TEST(StrongResidual, LocalBendingResidualSmall) {
    auto model = presets::validation_beam();
    model.bc = BcTag::SimplySupported;
    model.frac = {1.0, 1.0, model.L / 10.0};
    auto mesh = build_mesh(model.L, 500);
    Loads loads;
    loads.q0 = 100.0;
    Solution sol = solve_converse(model, mesh, loads);
    auto res = strong_residual(sol, model, mesh);
    EXPECT_GT(res.n_samples, 100);
    EXPECT_LE(res.bending, 1e-3);
}

TEST(StrongResidual, DirectModeElectricalResidual) {
    auto model = presets::layer_beam();
    model.frac = {0.8, 0.8, model.L / 10.0};
    auto mesh = build_mesh(model.L, 500, {{0.0, model.L}});
    Loads loads;
    loads.q0 = 1.0;
    Solution sol = solve_direct(model, mesh, loads);
    auto res = strong_residual(sol, model, mesh);
    ASSERT_TRUE(res.has_electrical);
    EXPECT_LE(res.electrical, 5e-2);
}

TEST(MonotoneTrends, RmsVoltageVersusNonlocality) {
    // layer beam: V_rms non-decreasing as alpha drops; patch cantilever:
    // non-increasing (opposite trend)
    double prev_layer = 0.0, prev_patch = 1e300;
    for (double alpha : {1.0, 0.9, 0.8, 0.7}) {
        auto layer = presets::layer_beam();
        layer.frac = {alpha, alpha, layer.L / 5.0};
        auto lm = build_mesh(layer.L, 100, {{0.0, layer.L}});
        Loads loads;
        loads.q0 = 1.0;
        double v_layer = rms_voltage(solve_direct(layer, lm, loads));
        EXPECT_GE(v_layer, prev_layer) << "alpha=" << alpha;
        prev_layer = v_layer;

        auto patch = presets::patch_beam();
        patch.frac = {alpha, alpha, patch.L / 5.0};
        auto pm = build_mesh(patch.L, 100, {{patch.patch.x0, patch.patch.length}});
        double v_patch = rms_voltage(solve_direct(patch, pm, loads));
        EXPECT_LE(v_patch, prev_patch) << "alpha=" << alpha;
        prev_patch = v_patch;
    }
}

TEST(StrongResidual, ZeroSolutionZeroResiduals) {
    auto model = presets::layer_beam();
    model.frac = {0.8, 0.8, model.L / 10.0};
    auto mesh = build_mesh(model.L, 60, {{0.0, model.L}});
    auto sol = zero_solution(model, mesh, Mode::Direct, Loads{});
    auto res = strong_residual(sol, model, mesh);
    EXPECT_EQ(res.axial, 0.0);
    EXPECT_EQ(res.bending, 0.0);
    EXPECT_EQ(res.electrical, 0.0);
}
