#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ffem {

struct PatchSpan {
    double x0 = 0.0;      // snapped start [m]
    double length = 0.0;  // snapped length [m]
    int first_element = 0;
    int n_elements = 0;
    double snap_distance = 0.0;  // how far the requested bounds moved
    bool snapped = false;
};

/// Uniform 1D mesh of two-noded elements over [0, L], with an optional patch
/// span aligned (snapped) to element boundaries.
class Mesh1D {
public:
    static Mesh1D build(double L, int n_elements, std::optional<std::array<double, 2>> patch = {}) {
        if (!(L > 0.0)) throw std::invalid_argument("build_mesh: length must be positive");
        if (n_elements < 2) throw std::invalid_argument("build_mesh: need at least 2 elements");
        Mesh1D m;
        m.length_ = L;
        m.n_elements_ = n_elements;
        m.element_length_ = L / n_elements;
        m.node_coords_.resize(n_elements + 1);
        for (int i = 0; i <= n_elements; ++i) m.node_coords_[i] = (L * i) / n_elements;
        m.node_coords_.front() = 0.0;
        m.node_coords_.back() = L;
        if (patch) {
            double x0 = (*patch)[0], lp = (*patch)[1];
            if (x0 < -1e-12 * L || x0 + lp > L * (1.0 + 1e-12))
                throw std::invalid_argument("build_mesh: patch outside the beam");
            int e0 = static_cast<int>(std::lround(x0 / m.element_length_));
            int e1 = static_cast<int>(std::lround((x0 + lp) / m.element_length_));
            e0 = std::max(0, std::min(e0, n_elements));
            e1 = std::max(0, std::min(e1, n_elements));
            if (e1 - e0 < 1) throw std::invalid_argument("build_mesh: patch shorter than one element");
            PatchSpan p;
            p.first_element = e0;
            p.n_elements = e1 - e0;
            p.x0 = m.node_coords_[e0];
            p.length = m.node_coords_[e1] - m.node_coords_[e0];
            p.snap_distance = std::max(std::abs(p.x0 - x0), std::abs(p.x0 + p.length - x0 - lp));
            p.snapped = p.snap_distance > 1e-12 * L;
            m.patch_ = p;
        }
        return m;
    }

    double length() const { return length_; }
    int n_elements() const { return n_elements_; }
    int n_nodes() const { return n_elements_ + 1; }
    double element_length() const { return element_length_; }
    double node(int i) const { return node_coords_[i]; }
    double element_start(int e) const { return node_coords_[e]; }
    double element_end(int e) const { return node_coords_[e + 1]; }
    const std::optional<PatchSpan>& patch() const { return patch_; }

    /// Element containing s: half-open intervals [x_e, x_{e+1}), closed at x = L.
    int locate_element(double s) const {
        if (s < -1e-12 * length_ || s > length_ * (1.0 + 1e-12))
            throw std::domain_error("locate_element: point outside the mesh");
        int e = static_cast<int>(std::floor(s / element_length_ + 1e-12));
        return std::clamp(e, 0, n_elements_ - 1);
    }

private:
    double length_ = 0.0;
    double element_length_ = 0.0;
    int n_elements_ = 0;
    std::vector<double> node_coords_;
    std::optional<PatchSpan> patch_;
};

inline Mesh1D build_mesh(double L, int n_elements, std::optional<std::array<double, 2>> patch = {}) {
    return Mesh1D::build(L, n_elements, patch);
}

/// DOF numbering: u and phi are nodal scalars, w carries (deflection, rotation)
/// pairs. phi DOFs exist on patch nodes only.
struct DofMap {
    int n_nodes = 0;
    int patch_first_node = 0;
    int n_patch_nodes = 0;

    static DofMap build(const Mesh1D& mesh, bool with_phi) {
        DofMap d;
        d.n_nodes = mesh.n_nodes();
        if (with_phi) {
            if (!mesh.patch()) throw std::invalid_argument("DofMap: phi field requires a patch");
            d.patch_first_node = mesh.patch()->first_element;
            d.n_patch_nodes = mesh.patch()->n_elements + 1;
        }
        return d;
    }

    int n_u() const { return n_nodes; }
    int n_w() const { return 2 * n_nodes; }
    int n_phi() const { return n_patch_nodes; }
    int u_dof(int node) const { return node; }
    int w_dof(int node) const { return 2 * node; }
    int theta_dof(int node) const { return 2 * node + 1; }
    int phi_dof(int node) const { return node - patch_first_node; }
};

struct LagrangeShape {
    std::array<double, 2> value;
    std::array<double, 2> dx;
};

/// Linear Lagrange pair on the unit element; derivatives are w.r.t. x.
inline LagrangeShape lagrange_eval(double xi, double l_e) {
    return {{1.0 - xi, xi}, {-1.0 / l_e, 1.0 / l_e}};
}

struct HermiteShape {
    std::array<double, 4> value;
    std::array<double, 4> dx;
    std::array<double, 4> dxx;
};

/// Cubic Hermite basis on [0, l_e] with DOFs (w1, th1, w2, th2), th = dw/dx.
inline HermiteShape hermite_eval(double xi, double l_e) {
    double xi2 = xi * xi, xi3 = xi2 * xi;
    HermiteShape h;
    h.value = {1.0 - 3.0 * xi2 + 2.0 * xi3, l_e * (xi - 2.0 * xi2 + xi3),
               3.0 * xi2 - 2.0 * xi3, l_e * (xi3 - xi2)};
    h.dx = {(-6.0 * xi + 6.0 * xi2) / l_e, 1.0 - 4.0 * xi + 3.0 * xi2,
            (6.0 * xi - 6.0 * xi2) / l_e, 3.0 * xi2 - 2.0 * xi};
    h.dxx = {(-6.0 + 12.0 * xi) / (l_e * l_e), (-4.0 + 6.0 * xi) / l_e,
             (6.0 - 12.0 * xi) / (l_e * l_e), (-2.0 + 6.0 * xi) / l_e};
    return h;
}

}  // namespace ffem
