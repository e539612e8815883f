#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffem/assembly.hpp"
#include "ffem/mesh.hpp"
#include "ffem/model.hpp"

namespace ffem {

enum class Mode { Converse, Direct };

inline std::string to_string(Mode m) { return m == Mode::Converse ? "converse" : "direct"; }

/// Constrained global DOFs in stacked (u | w | phi) indexing. Simply supported
/// pins the axial displacement at both ends (see decisions on Table 2).
inline std::vector<int> constrained_dofs(BcTag bc, const Mesh1D& mesh, const DofMap& dofs) {
    const int nu = dofs.n_u();
    const int last = mesh.n_elements();
    switch (bc) {
        case BcTag::SimplySupported:
            return {dofs.u_dof(0), dofs.u_dof(last), nu + dofs.w_dof(0), nu + dofs.w_dof(last)};
        case BcTag::ClampedClamped:
            return {dofs.u_dof(0), dofs.u_dof(last), nu + dofs.w_dof(0), nu + dofs.theta_dof(0),
                    nu + dofs.w_dof(last), nu + dofs.theta_dof(last)};
        case BcTag::Cantilever:
            return {dofs.u_dof(0), nu + dofs.w_dof(0), nu + dofs.theta_dof(0)};
    }
    throw std::logic_error("constrained_dofs: unknown tag");
}

/// Zero-value essential constraints applied by row/column elimination.
struct ReducedSystem {
    Eigen::MatrixXd K;
    Eigen::VectorXd F;
    std::vector<int> free_dofs;  // reduced index -> full index

    Eigen::VectorXd scatter(const Eigen::VectorXd& x, int n_full) const {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(n_full);
        for (std::size_t i = 0; i < free_dofs.size(); ++i) full[free_dofs[i]] = x[i];
        return full;
    }
};

inline ReducedSystem apply_bcs(const Eigen::MatrixXd& K, const Eigen::VectorXd& F,
                               const std::vector<int>& fixed) {
    const int n = static_cast<int>(K.rows());
    std::vector<char> is_fixed(n, 0);
    for (int d : fixed) {
        if (d < 0 || d >= n) throw std::invalid_argument("apply_bcs: constrained DOF out of range");
        is_fixed[d] = 1;
    }
    ReducedSystem r;
    r.free_dofs.reserve(n);
    for (int i = 0; i < n; ++i)
        if (!is_fixed[i]) r.free_dofs.push_back(i);
    if (r.free_dofs.empty()) throw std::invalid_argument("apply_bcs: empty free DOF set");
    const int nf = static_cast<int>(r.free_dofs.size());
    r.K.resize(nf, nf);
    r.F.resize(nf);
    for (int i = 0; i < nf; ++i) {
        r.F[i] = F[r.free_dofs[i]];
        for (int j = 0; j < nf; ++j) r.K(i, j) = K(r.free_dofs[i], r.free_dofs[j]);
    }
    return r;
}

namespace detail {

// Compensated residual accumulator: exact products via FMA, Neumaier summation.
// The bending spectrum makes fine meshes ill-conditioned (kappa ~ N^4), so
// refinement residuals must be evaluated beyond working precision for the two
// direct-effect routes to agree on the same discrete solution.
class DdAccumulator {
public:
    explicit DdAccumulator(const Eigen::VectorXd& init)
        : sum_(init.data(), init.data() + init.size()), comp_(init.size(), 0.0) {}

    void add(double v, Eigen::Index i) {
        double t = sum_[i] + v;
        if (std::abs(sum_[i]) >= std::abs(v))
            comp_[i] += (sum_[i] - t) + v;
        else
            comp_[i] += (v - t) + sum_[i];
        sum_[i] = t;
    }

    void add_product(double a, double b, Eigen::Index i) {
        double p = a * b;
        double e = std::fma(a, b, -p);
        add(p, i);
        add(e, i);
    }

    // accumulates -K x
    void sub_matvec(const Eigen::MatrixXd& K, const Eigen::VectorXd& x) {
        for (Eigen::Index j = 0; j < K.cols(); ++j) {
            double xj = x[j];
            if (xj == 0.0) continue;
            const double* col = K.data() + j * K.rows();
            for (Eigen::Index i = 0; i < K.rows(); ++i) add_product(col[i], -xj, i);
        }
    }

    // accumulates -K^T x
    void sub_matvec_transposed(const Eigen::MatrixXd& K, const Eigen::VectorXd& x) {
        for (Eigen::Index j = 0; j < K.cols(); ++j) {
            const double* col = K.data() + j * K.rows();
            double acc = 0.0, c = 0.0;
            for (Eigen::Index i = 0; i < K.rows(); ++i) {
                double p = col[i] * x[i];
                double e = std::fma(col[i], x[i], -p);
                double t = acc + p;
                c += (std::abs(acc) >= std::abs(p)) ? (acc - t) + p : (p - t) + acc;
                acc = t;
                c += e;
            }
            add(-acc, j);
            add(-c, j);
        }
    }

    Eigen::VectorXd value() const {
        Eigen::VectorXd r(static_cast<Eigen::Index>(sum_.size()));
        for (std::size_t i = 0; i < sum_.size(); ++i) r[i] = sum_[i] + comp_[i];
        return r;
    }

private:
    std::vector<double> sum_, comp_;
};

inline Eigen::VectorXd dd_residual(const Eigen::MatrixXd& K, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& F) {
    DdAccumulator acc(F);
    acc.sub_matvec(K, x);
    return acc.value();
}

// Jacobi-equilibrated symmetric solve with compensated iterative refinement.
// The scaled factorization only preconditions; residuals are evaluated against
// the original matrix, so the iterate converges to the stored system's
// solution rather than the scaled copy's.
template <typename Factorization>
Eigen::VectorXd scaled_solve(const Eigen::MatrixXd& K, const Eigen::VectorXd& F,
                             const std::string& context) {
    const Eigen::Index n = K.rows();
    Eigen::VectorXd d = K.diagonal().cwiseAbs().cwiseSqrt();
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(d[i] > 0.0)) d[i] = 1.0;
    Eigen::VectorXd dinv = d.cwiseInverse();
    Eigen::MatrixXd Ks = dinv.asDiagonal() * K * dinv.asDiagonal();
    Factorization fact(Ks);
    if (fact.info() != Eigen::Success) throw std::runtime_error(context + ": factorization failed");
    auto precond = [&](const Eigen::VectorXd& r) {
        return Eigen::VectorXd(dinv.asDiagonal() *
                               fact.solve(Eigen::VectorXd(dinv.asDiagonal() * r)));
    };
    Eigen::VectorXd x = precond(F);
    for (int pass = 0; pass < 4; ++pass) {
        Eigen::VectorXd dx = precond(dd_residual(K, x, F));
        x += dx;
        if (dx.norm() <= 4e-16 * x.norm()) break;
    }
    return x;
}

}  // namespace detail

struct SolutionMeta {
    std::uint64_t model_hash = 0;
    double alpha = 1.0;
    double h_l = 0.0;
    int n_elements = 0;
    Mode mode = Mode::Converse;
    BcTag bc = BcTag::SimplySupported;
    Loads loads;
};

struct Solution {
    Eigen::VectorXd u_g;    // nodal axial displacements
    Eigen::VectorXd w_g;    // interleaved (deflection, rotation) pairs
    Eigen::VectorXd phi_g;  // patch nodal potentials; empty in converse mode
    SolutionMeta meta;

    bool has_phi() const { return phi_g.size() > 0; }
};

enum class DirectMethod { Full, Condensed };

namespace detail {

inline SolutionMeta make_meta(const SmartBeamModel& model, const Mesh1D& mesh, Mode mode,
                              const Loads& loads) {
    SolutionMeta meta;
    meta.model_hash = model.hash();
    meta.alpha = model.frac.alpha_m;
    meta.h_l = model.frac.h_l;
    meta.n_elements = mesh.n_elements();
    meta.mode = mode;
    meta.bc = model.bc;
    meta.loads = loads;
    return meta;
}

}  // namespace detail

/// Converse (actuation) solve: prescribed patch potential, SPD mechanical system.
inline Solution solve_converse(const SmartBeamModel& model, const Mesh1D& mesh, const Loads& loads,
                               int quad_order = 4) {
    model.validate();
    const DofMap dofs = DofMap::build(mesh, false);
    GlobalSystem sys;
    assemble_mechanical(model, mesh, sys, quad_order);
    assemble_loads(model, mesh, loads, sys, quad_order);
    const int nu = dofs.n_u(), nw = dofs.n_w();
    Eigen::MatrixXd K(nu + nw, nu + nw);
    K.topLeftCorner(nu, nu) = sys.K_uu;
    K.topRightCorner(nu, nw) = sys.K_uw;
    K.bottomLeftCorner(nw, nu) = sys.K_uw.transpose();
    K.bottomRightCorner(nw, nw) = sys.K_ww;
    Eigen::VectorXd F(nu + nw);
    F.head(nu) = sys.F_a + sys.F_ae;
    F.tail(nw) = sys.F_t + sys.F_te;
    ReducedSystem red = apply_bcs(K, F, constrained_dofs(model.bc, mesh, dofs));
    Eigen::VectorXd xr = detail::scaled_solve<Eigen::LLT<Eigen::MatrixXd>>(
        red.K, red.F, "solve_converse (bc " + to_string(model.bc) + ")");
    Eigen::VectorXd x = red.scatter(xr, nu + nw);
    Solution sol;
    sol.u_g = x.head(nu);
    sol.w_g = x.tail(nw);
    sol.meta = detail::make_meta(model, mesh, Mode::Converse, loads);
    return sol;
}

/// Direct (sensing) solve in open circuit. Default path condenses the
/// electrical DOFs; the full symmetric-indefinite path is kept as the
/// independent algebraic route.
inline Solution solve_direct(const SmartBeamModel& model, const Mesh1D& mesh, const Loads& loads,
                             DirectMethod method = DirectMethod::Condensed, int quad_order = 4) {
    model.validate();
    if (!(model.patch.h_P > 0.0))
        throw std::invalid_argument("solve_direct: direct effect requires a patch with h_P > 0");
    const DofMap dofs = DofMap::build(mesh, true);
    GlobalSystem sys;
    assemble_mechanical(model, mesh, sys, quad_order);
    assemble_coupling(model, mesh, sys, quad_order);
    Loads mech = loads;
    mech.phi0 = 0.0;  // open circuit: no prescribed potential
    assemble_loads(model, mesh, mech, sys, quad_order);
    const int nu = dofs.n_u(), nw = dofs.n_w(), np = dofs.n_phi();

    Eigen::MatrixXd Km(nu + nw, nu + nw);
    Km.topLeftCorner(nu, nu) = sys.K_uu;
    Km.topRightCorner(nu, nw) = sys.K_uw;
    Km.bottomLeftCorner(nw, nu) = sys.K_uw.transpose();
    Km.bottomRightCorner(nw, nw) = sys.K_ww;
    Eigen::MatrixXd C(nu + nw, np);
    C.topRows(nu) = sys.K_uphi;
    C.bottomRows(nw) = sys.K_wphi;
    Eigen::VectorXd Fm(nu + nw);
    Fm.head(nu) = sys.F_a;
    Fm.tail(nw) = sys.F_t;

    auto fixed = constrained_dofs(model.bc, mesh, dofs);
    Solution sol;
    sol.meta = detail::make_meta(model, mesh, Mode::Direct, loads);

    if (method == DirectMethod::Full) {
        const int n = nu + nw + np;
        Eigen::MatrixXd K(n, n);
        K.topLeftCorner(nu + nw, nu + nw) = Km;
        K.topRightCorner(nu + nw, np) = C;
        K.bottomLeftCorner(np, nu + nw) = C.transpose();
        K.bottomRightCorner(np, np) = sys.K_phiphi;
        Eigen::VectorXd F(n);
        F.head(nu + nw) = Fm;
        F.tail(np).setZero();
        ReducedSystem red = apply_bcs(K, F, fixed);
        Eigen::VectorXd xr = detail::scaled_solve<Eigen::LDLT<Eigen::MatrixXd>>(
            red.K, red.F, "solve_direct (bc " + to_string(model.bc) + ")");
        Eigen::VectorXd x = red.scatter(xr, n);
        sol.u_g = x.head(nu);
        sol.w_g = x.segment(nu, nw);
        sol.phi_g = x.tail(np);
        return sol;
    }

    // Condensation: phi = -K_phiphi^{-1} C^T x_m; S = -K_phiphi is SPD.
    Eigen::LLT<Eigen::MatrixXd> sllt(Eigen::MatrixXd(-sys.K_phiphi));
    if (sllt.info() != Eigen::Success)
        throw std::runtime_error("solve_direct: electrical block singular (degenerate h_P or a33)");
    Eigen::MatrixXd Y = sllt.solve(C.transpose());       // S^{-1} C^T
    Eigen::MatrixXd Keff = Km + C * Y;                   // Km + C S^{-1} C^T
    ReducedSystem red = apply_bcs(Keff, Fm, fixed);

    const Eigen::Index nf = red.K.rows();
    Eigen::VectorXd d = red.K.diagonal().cwiseAbs().cwiseSqrt();
    for (Eigen::Index i = 0; i < nf; ++i)
        if (!(d[i] > 0.0)) d[i] = 1.0;
    Eigen::VectorXd dinv = d.cwiseInverse();
    Eigen::MatrixXd Ks = dinv.asDiagonal() * red.K * dinv.asDiagonal();
    Eigen::LLT<Eigen::MatrixXd> llt(Ks);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("solve_direct: factorization failed for bc " + to_string(model.bc));
    auto solve_eff = [&](const Eigen::VectorXd& rhs_free) {
        return Eigen::VectorXd(dinv.asDiagonal() *
                               llt.solve(Eigen::VectorXd(dinv.asDiagonal() * rhs_free)));
    };

    Eigen::VectorXd xm = red.scatter(solve_eff(red.F), nu + nw);
    Eigen::VectorXd phi = sllt.solve(-C.transpose() * xm);

    // Block refinement against the assembled blocks: both solve routes then
    // converge to the same discrete solution despite the N^4 conditioning.
    for (int pass = 0; pass < 4; ++pass) {
        detail::DdAccumulator rm_acc(Fm);
        rm_acc.sub_matvec(Km, xm);
        rm_acc.sub_matvec(C, phi);
        Eigen::VectorXd rm = rm_acc.value();
        detail::DdAccumulator rp_acc(Eigen::VectorXd::Zero(np));
        rp_acc.sub_matvec_transposed(C, xm);
        rp_acc.sub_matvec(sys.K_phiphi, phi);
        Eigen::VectorXd rp = rp_acc.value();
        Eigen::VectorXd rhs(nf);
        Eigen::VectorXd csr = C * sllt.solve(rp);  // C S^{-1} r_p
        for (Eigen::Index i = 0; i < nf; ++i) rhs[i] = rm[red.free_dofs[i]] + csr[red.free_dofs[i]];
        Eigen::VectorXd dx = red.scatter(solve_eff(rhs), nu + nw);
        Eigen::VectorXd dphi = -sllt.solve(rp - C.transpose() * dx);
        xm += dx;
        phi += dphi;
        if (dx.norm() <= 4e-16 * xm.norm() && dphi.norm() <= 4e-16 * std::max(phi.norm(), 1e-300))
            break;
    }

    sol.u_g = xm.head(nu);
    sol.w_g = xm.tail(nw);
    sol.phi_g = phi;
    return sol;
}

}  // namespace ffem
