#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ffem/fractional.hpp"
#include "ffem/mesh.hpp"
#include "ffem/model.hpp"
#include "ffem/quadrature.hpp"

namespace ffem {

/// Axial span over which a row's horizon is truncated: the whole beam for
/// substrate terms, the patch for patch terms.
struct Region {
    double start = 0.0;
    double end = 0.0;
};

/// One row of a fractional strain-displacement operator: dense coefficients
/// over the contiguous DOF span covered by the horizon.
struct NonlocalRow {
    double x = 0.0;
    Horizon horizon;
    int first_dof = 0;            // global index of coef[0]
    std::vector<double> coef;

    int last_dof() const { return first_dof + static_cast<int>(coef.size()) - 1; }

    double dot(const Eigen::VectorXd& v) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < coef.size(); ++i) acc += coef[i] * v[first_dof + i];
        return acc;
    }

    Eigen::VectorXd dense(int n) const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < coef.size(); ++i) v[first_dof + i] = coef[i];
        return v;
    }
};

namespace detail {

struct ElementRange {
    int lo = 0;
    int hi = -1;  // inclusive
};

inline ElementRange covered_elements(const Mesh1D& mesh, double lo, double hi) {
    double le = mesh.element_length();
    ElementRange r;
    r.lo = std::clamp(static_cast<int>(std::floor(lo / le + 1e-12)), 0, mesh.n_elements() - 1);
    r.hi = std::clamp(static_cast<int>(std::ceil(hi / le - 1e-12)) - 1, 0, mesh.n_elements() - 1);
    return r;
}

// H''_i(s) = a_i + b_i (s - x) on element e, recentered about the row point.
inline void hermite_dxx_about(double x, double xe, double le, std::array<double, 4>& a,
                              std::array<double, 4>& b) {
    double le2 = le * le;
    double xix = (x - xe) / le;
    a = {(12.0 * xix - 6.0) / le2, (6.0 * xix - 4.0) / le, (6.0 - 12.0 * xix) / le2,
         (6.0 * xix - 2.0) / le};
    b = {12.0 / (le2 * le), 6.0 / le2, -12.0 / (le2 * le), 6.0 / le2};
}

}  // namespace detail

/// Row mapping global u DOFs to D^alpha u0(x), horizon truncated at the region.
inline NonlocalRow b_alpha_u(double x, const FractionalParams& frac, const Region& region,
                             const Mesh1D& mesh) {
    const double le = mesh.element_length();
    const double alpha = frac.alpha_m;
    NonlocalRow row;
    row.x = x;
    if (alpha == 1.0) {
        int e = mesh.locate_element(x);
        row.horizon = {0.0, 0.0};
        row.first_dof = e;
        row.coef = {-1.0 / le, 1.0 / le};
        return row;
    }
    Horizon hz = horizon_at(x, region.start, region.end, frac.h_l);
    row.horizon = hz;
    auto span = detail::covered_elements(mesh, x - hz.l_A, x + hz.l_B);
    row.first_dof = span.lo;
    row.coef.assign(span.hi - span.lo + 2, 0.0);
    auto add_side = [&](double lo, double hi, double l_side) {
        if (l_side <= 0.0) {
            int e = mesh.locate_element(x);
            row.coef[e - span.lo] += 0.5 * (-1.0 / le);
            row.coef[e - span.lo + 1] += 0.5 * (1.0 / le);
            return;
        }
        auto er = detail::covered_elements(mesh, lo, hi);
        for (int e = er.lo; e <= er.hi; ++e) {
            double a = std::max(mesh.element_start(e), lo);
            double b = std::min(mesh.element_end(e), hi);
            if (b - a <= 0.0) continue;
            auto mu = kernel_moments_about_x(a, b, x, alpha, l_side, 0);
            row.coef[e - span.lo] += mu[0] * (-1.0 / le);
            row.coef[e - span.lo + 1] += mu[0] * (1.0 / le);
        }
    };
    add_side(x - hz.l_A, x, hz.l_A);
    add_side(x, x + hz.l_B, hz.l_B);
    return row;
}

/// Row mapping global (w, theta) DOFs to D^alpha[dw0/dx](x).
inline NonlocalRow b_alpha_w(double x, const FractionalParams& frac, const Region& region,
                             const Mesh1D& mesh) {
    const double le = mesh.element_length();
    const double alpha = frac.alpha_m;
    NonlocalRow row;
    row.x = x;
    std::array<double, 4> a_c, b_c;
    if (alpha == 1.0) {
        int e = mesh.locate_element(x);
        detail::hermite_dxx_about(x, mesh.element_start(e), le, a_c, b_c);
        row.horizon = {0.0, 0.0};
        row.first_dof = 2 * e;
        row.coef = {a_c[0], a_c[1], a_c[2], a_c[3]};
        return row;
    }
    Horizon hz = horizon_at(x, region.start, region.end, frac.h_l);
    row.horizon = hz;
    auto span = detail::covered_elements(mesh, x - hz.l_A, x + hz.l_B);
    row.first_dof = 2 * span.lo;
    row.coef.assign(2 * (span.hi - span.lo + 2), 0.0);
    auto add_side = [&](double lo, double hi, double l_side) {
        if (l_side <= 0.0) {
            int e = mesh.locate_element(x);
            detail::hermite_dxx_about(x, mesh.element_start(e), le, a_c, b_c);
            for (int i = 0; i < 4; ++i) row.coef[2 * (e - span.lo) + i] += 0.5 * a_c[i];
            return;
        }
        auto er = detail::covered_elements(mesh, lo, hi);
        for (int e = er.lo; e <= er.hi; ++e) {
            double a = std::max(mesh.element_start(e), lo);
            double b = std::min(mesh.element_end(e), hi);
            if (b - a <= 0.0) continue;
            auto mu = kernel_moments_about_x(a, b, x, alpha, l_side, 1);
            detail::hermite_dxx_about(x, mesh.element_start(e), le, a_c, b_c);
            for (int i = 0; i < 4; ++i)
                row.coef[2 * (e - span.lo) + i] += a_c[i] * mu[0] + b_c[i] * mu[1];
        }
    };
    add_side(x - hz.l_A, x, hz.l_A);
    add_side(x, x + hz.l_B, hz.l_B);
    return row;
}

struct Loads {
    double q0 = 0.0;    // transverse UDL [N/m]
    double f_a = 0.0;   // axial distributed load [N/m]
    double phi0 = 0.0;  // prescribed patch potential (converse mode) [V]
    // optional per-node potential profile over the patch nodes; overrides the
    // uniform phi0 when present
    std::vector<double> phi0_profile;
};

/// Assembled global blocks of the coupled electro-mechanical system.
struct GlobalSystem {
    Eigen::MatrixXd K_uu, K_uw, K_ww;            // mechanical
    Eigen::MatrixXd K_uphi, K_wphi, K_phiphi;    // electrical coupling (direct mode)
    Eigen::VectorXd F_a, F_t, F_ae, F_te;
    bool has_electrical = false;
};

namespace detail {

inline void rank1_accumulate(Eigen::MatrixXd& K, const NonlocalRow& r, const NonlocalRow& c,
                             double w) {
    Eigen::Map<const Eigen::VectorXd> vr(r.coef.data(), r.coef.size());
    Eigen::Map<const Eigen::VectorXd> vc(c.coef.data(), c.coef.size());
    K.block(r.first_dof, c.first_dof, vr.size(), vc.size()).noalias() += w * vr * vc.transpose();
}

inline Region substrate_region(const SmartBeamModel& model) { return {0.0, model.L}; }

inline Region patch_region(const Mesh1D& mesh) {
    const auto& p = *mesh.patch();
    return {p.x0, p.x0 + p.length};
}

}  // namespace detail

/// Mechanical stiffness blocks K_uu, K_uw, K_ww (substrate + patch + optional
/// electrode films; films use integer-order rows).
inline void assemble_mechanical(const SmartBeamModel& model, const Mesh1D& mesh, GlobalSystem& sys,
                                int quad_order = 4) {
    const DofMap dofs = DofMap::build(mesh, false);
    const SectionConstants sc = section_constants(model);
    const auto q = gauss_legendre_01(quad_order);
    const double le = mesh.element_length();
    sys.K_uu = Eigen::MatrixXd::Zero(dofs.n_u(), dofs.n_u());
    sys.K_ww = Eigen::MatrixXd::Zero(dofs.n_w(), dofs.n_w());
    sys.K_uw = Eigen::MatrixXd::Zero(dofs.n_u(), dofs.n_w());
    const Region sub = detail::substrate_region(model);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        for (const auto& g : q) {
            double x = mesh.element_start(e) + g.xi * le;
            double w = g.w * le;
            NonlocalRow ru = b_alpha_u(x, model.frac, sub, mesh);
            NonlocalRow rw = b_alpha_w(x, model.frac, sub, mesh);
            detail::rank1_accumulate(sys.K_uu, ru, ru, w * model.materials.E_S * sc.A);
            detail::rank1_accumulate(sys.K_ww, rw, rw, w * model.materials.E_S * sc.I);
        }
    }
    if (model.has_patch() && mesh.patch()) {
        const Region pr = detail::patch_region(mesh);
        const auto& p = *mesh.patch();
        FractionalParams local = model.frac;
        local.alpha_m = 1.0;
        ElectrodeConstants ec = electrode_constants(model);
        for (int e = p.first_element; e < p.first_element + p.n_elements; ++e) {
            for (const auto& g : q) {
                double x = mesh.element_start(e) + g.xi * le;
                double w = g.w * le;
                NonlocalRow ru = b_alpha_u(x, model.frac, pr, mesh);
                NonlocalRow rw = b_alpha_w(x, model.frac, pr, mesh);
                detail::rank1_accumulate(sys.K_uu, ru, ru, w * model.materials.E_P * sc.A_P);
                detail::rank1_accumulate(sys.K_ww, rw, rw, w * model.materials.E_P * sc.I_P);
                detail::rank1_accumulate(sys.K_uw, ru, rw, -w * model.materials.E_P * sc.B_P);
                if (model.electrodes) {
                    NonlocalRow lu = b_alpha_u(x, local, pr, mesh);
                    NonlocalRow lw = b_alpha_w(x, local, pr, mesh);
                    detail::rank1_accumulate(sys.K_uu, lu, lu, w * ec.A_e * model.electrodes->E_e);
                    detail::rank1_accumulate(sys.K_ww, lw, lw, w * ec.I_e * model.electrodes->E_e);
                    detail::rank1_accumulate(sys.K_uw, lu, lw, -w * ec.B_e * model.electrodes->E_e);
                }
            }
        }
    }
}

/// Electrical coupling blocks of the direct-effect system.
inline void assemble_coupling(const SmartBeamModel& model, const Mesh1D& mesh, GlobalSystem& sys,
                              int quad_order = 4) {
    if (!model.has_patch() || !mesh.patch())
        throw std::invalid_argument("assemble_coupling: coupling requires a patch with h_P > 0");
    const DofMap dofs = DofMap::build(mesh, true);
    const SectionConstants sc = section_constants(model);
    const auto q = gauss_legendre_01(quad_order);
    const double le = mesh.element_length();
    const double hP = model.patch.h_P;
    const double e31 = model.materials.e31;
    sys.K_uphi = Eigen::MatrixXd::Zero(dofs.n_u(), dofs.n_phi());
    sys.K_wphi = Eigen::MatrixXd::Zero(dofs.n_w(), dofs.n_phi());
    sys.K_phiphi = Eigen::MatrixXd::Zero(dofs.n_phi(), dofs.n_phi());
    const Region pr = detail::patch_region(mesh);
    const auto& p = *mesh.patch();
    for (int e = p.first_element; e < p.first_element + p.n_elements; ++e) {
        int pe = e - p.first_element;
        for (const auto& g : q) {
            double x = mesh.element_start(e) + g.xi * le;
            double w = g.w * le;
            NonlocalRow ru = b_alpha_u(x, model.frac, pr, mesh);
            NonlocalRow rw = b_alpha_w(x, model.frac, pr, mesh);
            auto L = lagrange_eval(g.xi, le);
            Eigen::Vector2d Lv(L.value[0], L.value[1]);
            Eigen::Map<const Eigen::VectorXd> vu(ru.coef.data(), ru.coef.size());
            Eigen::Map<const Eigen::VectorXd> vw(rw.coef.data(), rw.coef.size());
            sys.K_uphi.block(ru.first_dof, pe, vu.size(), 2).noalias() +=
                (w * sc.A_P * e31 / hP) * vu * Lv.transpose();
            sys.K_wphi.block(rw.first_dof, pe, vw.size(), 2).noalias() +=
                (-w * sc.B_P * e31 / hP) * vw * Lv.transpose();
            sys.K_phiphi.block(pe, pe, 2, 2).noalias() +=
                (-w * model.materials.a33 * sc.A_P / (hP * hP)) * Lv * Lv.transpose();
        }
    }
    sys.has_electrical = true;
}

/// Mechanical and converse-effect load vectors.
inline void assemble_loads(const SmartBeamModel& model, const Mesh1D& mesh, const Loads& loads,
                           GlobalSystem& sys, int quad_order = 4) {
    const DofMap dofs = DofMap::build(mesh, false);
    const SectionConstants sc = section_constants(model);
    const auto q = gauss_legendre_01(quad_order);
    const double le = mesh.element_length();
    sys.F_a = Eigen::VectorXd::Zero(dofs.n_u());
    sys.F_t = Eigen::VectorXd::Zero(dofs.n_w());
    sys.F_ae = Eigen::VectorXd::Zero(dofs.n_u());
    sys.F_te = Eigen::VectorXd::Zero(dofs.n_w());
    for (int e = 0; e < mesh.n_elements(); ++e) {
        for (const auto& g : q) {
            double w = g.w * le;
            auto L = lagrange_eval(g.xi, le);
            auto H = hermite_eval(g.xi, le);
            for (int i = 0; i < 2; ++i) sys.F_a[e + i] += w * loads.f_a * L.value[i];
            for (int i = 0; i < 4; ++i) sys.F_t[2 * e + i] += w * loads.q0 * H.value[i];
        }
    }
    const bool has_profile = !loads.phi0_profile.empty();
    if (model.has_patch() && mesh.patch() && (loads.phi0 != 0.0 || has_profile)) {
        const double hP = model.patch.h_P;
        const double e31 = model.materials.e31;
        const Region pr = detail::patch_region(mesh);
        const auto& p = *mesh.patch();
        if (has_profile && loads.phi0_profile.size() != static_cast<std::size_t>(p.n_elements + 1))
            throw std::invalid_argument("assemble_loads: phi0 profile must hold one value per patch node");
        for (int e = p.first_element; e < p.first_element + p.n_elements; ++e) {
            int pe = e - p.first_element;
            for (const auto& g : q) {
                double x = mesh.element_start(e) + g.xi * le;
                double w = g.w * le;
                double phi = has_profile ? (1.0 - g.xi) * loads.phi0_profile[pe] +
                                               g.xi * loads.phi0_profile[pe + 1]
                                         : loads.phi0;
                NonlocalRow ru = b_alpha_u(x, model.frac, pr, mesh);
                NonlocalRow rw = b_alpha_w(x, model.frac, pr, mesh);
                double cu = -w * e31 * phi * sc.A_P / hP;
                double cw = w * e31 * phi * sc.B_P / hP;
                for (std::size_t i = 0; i < ru.coef.size(); ++i)
                    sys.F_ae[ru.first_dof + i] += cu * ru.coef[i];
                for (std::size_t i = 0; i < rw.coef.size(); ++i)
                    sys.F_te[rw.first_dof + i] += cw * rw.coef[i];
            }
        }
    }
}

}  // namespace ffem
