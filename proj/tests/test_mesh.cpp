#include <gtest/gtest.h>

#include "ffem/mesh.hpp"

using namespace ffem;

TEST(Mesh, PaperConfiguration) {
    double L = 24.53e-3;
    auto mesh = build_mesh(L, 500, {{0.0, L}});
    EXPECT_EQ(mesh.n_elements(), 500);
    EXPECT_DOUBLE_EQ(mesh.element_length(), L / 500);
    ASSERT_TRUE(mesh.patch());
    EXPECT_EQ(mesh.patch()->n_elements, 500);
    EXPECT_FALSE(mesh.patch()->snapped);
    EXPECT_DOUBLE_EQ(mesh.node(0), 0.0);
    EXPECT_DOUBLE_EQ(mesh.node(500), L);
}

TEST(Mesh, PatchAlignmentAndSnapping) {
    auto exact = build_mesh(1.0, 10, {{0.0, 0.3}});
    EXPECT_EQ(exact.patch()->first_element, 0);
    EXPECT_EQ(exact.patch()->n_elements, 3);
    EXPECT_FALSE(exact.patch()->snapped);

    auto snapped = build_mesh(1.0, 10, {{0.0, 0.33}});
    EXPECT_EQ(snapped.patch()->n_elements, 3);
    EXPECT_TRUE(snapped.patch()->snapped);
    EXPECT_NEAR(snapped.patch()->snap_distance, 0.03, 1e-12);

    EXPECT_THROW(build_mesh(1.0, 10, {{0.0, 0.04}}), std::invalid_argument);
    EXPECT_THROW(build_mesh(1.0, 10, {{0.5, 0.7}}), std::invalid_argument);
    EXPECT_THROW(build_mesh(1.0, 1), std::invalid_argument);
}

TEST(Mesh, LocateElement) {
    auto mesh = build_mesh(1.0, 10);
    EXPECT_EQ(mesh.locate_element(0.0), 0);
    EXPECT_EQ(mesh.locate_element(1.0), 9);       // right closure
    EXPECT_EQ(mesh.locate_element(0.3), 3);       // interior node -> right element
    EXPECT_EQ(mesh.locate_element(0.2999999), 2);
    EXPECT_THROW(mesh.locate_element(-0.01), std::domain_error);
    EXPECT_THROW(mesh.locate_element(1.01), std::domain_error);
    // consistency: element_start(e) <= s < element_end(e)
    for (double s : {0.05, 0.15, 0.73, 0.999}) {
        int e = mesh.locate_element(s);
        EXPECT_LE(mesh.element_start(e), s);
        EXPECT_LT(s, mesh.element_end(e) + 1e-15);
    }
}

TEST(Shapes, LagrangeNodalAndPartitionOfUnity) {
    double le = 0.05;
    auto s0 = lagrange_eval(0.0, le);
    EXPECT_DOUBLE_EQ(s0.value[0], 1.0);
    EXPECT_DOUBLE_EQ(s0.value[1], 0.0);
    auto s1 = lagrange_eval(1.0, le);
    EXPECT_DOUBLE_EQ(s1.value[0], 0.0);
    EXPECT_DOUBLE_EQ(s1.value[1], 1.0);
    for (double xi : {0.1, 0.37, 0.92}) {
        auto s = lagrange_eval(xi, le);
        EXPECT_NEAR(s.value[0] + s.value[1], 1.0, 1e-15);
        EXPECT_DOUBLE_EQ(s.dx[0], -1.0 / le);
        EXPECT_DOUBLE_EQ(s.dx[1], 1.0 / le);
    }
}

TEST(Shapes, HermiteCompleteness) {
    double le = 0.07;
    auto h0 = hermite_eval(0.0, le);
    EXPECT_DOUBLE_EQ(h0.value[0], 1.0);
    EXPECT_DOUBLE_EQ(h0.value[1], 0.0);
    EXPECT_DOUBLE_EQ(h0.value[2], 0.0);
    EXPECT_DOUBLE_EQ(h0.value[3], 0.0);
    for (double xi : {0.0, 0.21, 0.5, 0.88, 1.0}) {
        auto h = hermite_eval(xi, le);
        // deflection shape functions partition unity (rotations weighted zero)
        EXPECT_NEAR(h.value[0] + h.value[2], 1.0, 1e-14);
        // w(x) = x: dofs (0, 1, le, 1)
        double w = h.value[1] + le * h.value[2] + h.value[3];
        EXPECT_NEAR(w, xi * le, 1e-15);
        // w(x) = x^2: dofs (0, 0, le^2, 2 le) has w'' = 2 everywhere
        double wxx = le * le * h.dxx[2] + 2 * le * h.dxx[3];
        EXPECT_NEAR(wxx, 2.0, 1e-11);
    }
}

TEST(DofMapping, CountsAndIndices) {
    auto mesh = build_mesh(1.0, 10, {{0.3, 0.4}});
    auto plain = DofMap::build(mesh, false);
    EXPECT_EQ(plain.n_u(), 11);
    EXPECT_EQ(plain.n_w(), 22);
    EXPECT_EQ(plain.n_phi(), 0);
    auto coupled = DofMap::build(mesh, true);
    EXPECT_EQ(coupled.n_phi(), 5);  // nodes 3..7
    EXPECT_EQ(coupled.phi_dof(3), 0);
    EXPECT_EQ(coupled.phi_dof(7), 4);
    EXPECT_EQ(coupled.w_dof(4), 8);
    EXPECT_EQ(coupled.theta_dof(4), 9);
    auto nopatch = build_mesh(1.0, 4);
    EXPECT_THROW(DofMap::build(nopatch, true), std::invalid_argument);
}
