#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ffem {

/// Fractional constitutive parameters: orders for the mechanical and electrical
/// fields plus the nominal horizon of nonlocal influence.
struct FractionalParams {
    double alpha_m = 1.0;  // mechanical order in (0,1]
    double alpha_e = 1.0;  // electrical order in (0,1]; the transverse field stays local
    double h_l = 0.0;      // nominal horizon length [m]

    void validate(double domain_length) const {
        if (!(alpha_m > 0.0 && alpha_m <= 1.0)) throw std::invalid_argument("alpha_m must be in (0,1]");
        if (!(alpha_e > 0.0 && alpha_e <= 1.0)) throw std::invalid_argument("alpha_e must be in (0,1]");
        if (!(h_l > 0.0)) throw std::invalid_argument("h_l must be positive");
        if (h_l > domain_length) throw std::invalid_argument("h_l exceeds domain length");
    }
};

/// One-sided horizon lengths at an evaluation point. Interior points carry
/// l_A = l_B = h_l; near a boundary the nearer side shrinks to the distance
/// to that boundary.
struct Horizon {
    double l_A = 0.0;
    double l_B = 0.0;
};

inline Horizon horizon_at(double x, double domain_start, double domain_end, double h_l) {
    if (x < domain_start - 1e-14 * (domain_end - domain_start) ||
        x > domain_end + 1e-14 * (domain_end - domain_start))
        throw std::domain_error("horizon_at: x outside domain");
    return {std::min(h_l, x - domain_start), std::min(h_l, domain_end - x)};
}

/// Power-law attenuation A(x,s) = (1/2)(1-alpha) l_side^(alpha-1) |x-s|^(-alpha),
/// with l_side = l_A for s < x and l_B for s > x. Valid for alpha in (0,1) only;
/// alpha = 1 must branch to the integer-order path.
inline double kernel_weight(double x, double s, double alpha, const Horizon& hz) {
    if (alpha >= 1.0) throw std::invalid_argument("kernel_weight: alpha = 1 requires the local branch");
    if (alpha <= 0.0) throw std::invalid_argument("kernel_weight: alpha must be positive");
    if (s == x) throw std::domain_error("kernel_weight: singular point s = x");
    double l_side = (s < x) ? hz.l_A : hz.l_B;
    if (s < x - hz.l_A || s > x + hz.l_B) throw std::domain_error("kernel_weight: s outside horizon");
    return 0.5 * (1.0 - alpha) * std::pow(l_side, alpha - 1.0) * std::pow(std::abs(x - s), -alpha);
}

/// Exact moments mu_j = int_a^b A(x,s) (s-x)^j ds, j = 0..deg, for a one-sided
/// interval [a,b] (entirely left or right of x). These are the primitives every
/// element-level inner integral reduces to.
inline std::array<double, 4> kernel_moments_about_x(double a, double b, double x, double alpha,
                                                    double l_side, int deg) {
    if (deg < 0 || deg > 3) throw std::invalid_argument("kernel_moments_about_x: degree out of range");
    std::array<double, 4> mu{0.0, 0.0, 0.0, 0.0};
    if (b <= a) return mu;
    double t0, t1, sgn;
    const double tol = 1e-14 * (b - a);
    if (b <= x + tol) {  // left side
        t0 = x - b;
        t1 = x - a;
        sgn = -1.0;
    } else if (a >= x - tol) {  // right side
        t0 = a - x;
        t1 = b - x;
        sgn = 1.0;
    } else {
        throw std::invalid_argument("kernel_moments_about_x: interval straddles x; split at x first");
    }
    t0 = std::max(t0, 0.0);
    const double C = 0.5 * (1.0 - alpha) * std::pow(l_side, alpha - 1.0);
    double s = 1.0;
    for (int j = 0; j <= deg; ++j) {
        double p = j + 1.0 - alpha;
        mu[j] = C * s * (std::pow(t1, p) - std::pow(t0, p)) / p;
        s *= sgn;
    }
    return mu;
}

/// Moments of the kernel against plain powers: int_a^b A(x,s) s^j ds, j = 0..max_degree.
/// Assembled from the centered moments by binomial expansion.
inline std::array<double, 4> powerlaw_moments(double a, double b, double x, double alpha,
                                              double l_side, int max_degree) {
    if (max_degree < 0 || max_degree > 3) throw std::invalid_argument("powerlaw_moments: degree out of range");
    std::array<double, 4> m{0.0, 0.0, 0.0, 0.0};
    if (b <= a) return m;
    auto mu = kernel_moments_about_x(a, b, x, alpha, l_side, max_degree);
    static const double binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    for (int j = 0; j <= max_degree; ++j) {
        double acc = 0.0, xp = 1.0;
        for (int k = j; k >= 0; --k) {  // x^(j-k) mu_k, building x powers upward
            acc += binom[j][k] * xp * mu[k];
            xp *= x;
        }
        // loop above multiplies mu_j..mu_0 by x^0..x^j
        m[j] = acc;
    }
    return m;
}

/// A piecewise-polynomial field on [breaks.front(), breaks.back()]; each piece
/// holds value coefficients in the global coordinate, degree <= 3.
class PiecewiseField {
public:
    PiecewiseField(std::vector<double> breaks, std::vector<std::array<double, 4>> coef)
        : breaks_(std::move(breaks)), coef_(std::move(coef)) {
        if (breaks_.size() < 2 || coef_.size() + 1 != breaks_.size())
            throw std::invalid_argument("PiecewiseField: inconsistent breakpoints/coefficients");
        for (std::size_t i = 1; i < breaks_.size(); ++i)
            if (!(breaks_[i] > breaks_[i - 1]))
                throw std::invalid_argument("PiecewiseField: breakpoints must increase");
    }

    /// Piecewise-linear interpolant through samples.
    static PiecewiseField from_samples(const std::vector<double>& xs, const std::vector<double>& ys) {
        if (xs.size() != ys.size() || xs.size() < 2)
            throw std::invalid_argument("PiecewiseField::from_samples: need matching samples");
        std::vector<std::array<double, 4>> c(xs.size() - 1);
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            double slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
            c[i] = {ys[i] - slope * xs[i], slope, 0.0, 0.0};
        }
        return PiecewiseField(xs, std::move(c));
    }

    double start() const { return breaks_.front(); }
    double end() const { return breaks_.back(); }
    std::size_t piece_count() const { return coef_.size(); }
    const std::vector<double>& breaks() const { return breaks_; }

    std::size_t locate(double s) const {
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
        std::ptrdiff_t i = (it - breaks_.begin()) - 1;
        i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(coef_.size()) - 1);
        return static_cast<std::size_t>(i);
    }

    double value(double s) const {
        const auto& c = coef_[locate(s)];
        return ((c[3] * s + c[2]) * s + c[1]) * s + c[0];
    }

    double derivative(double s) const {
        const auto& c = coef_[locate(s)];
        return (3.0 * c[3] * s + 2.0 * c[2]) * s + c[1];
    }

    /// Derivative-polynomial coefficients of piece i recentered about x:
    /// p'(s) = d0 + d1 (s-x) + d2 (s-x)^2.
    std::array<double, 4> derivative_coeffs_about(std::size_t i, double x) const {
        const auto& c = coef_[i];
        double d0 = c[1] + 2.0 * c[2] * x + 3.0 * c[3] * x * x;
        double d1 = 2.0 * c[2] + 6.0 * c[3] * x;
        double d2 = 3.0 * c[3];
        return {d0, d1, d2, 0.0};
    }

    /// Value-polynomial coefficients of piece i recentered about x (degree <= 3).
    std::array<double, 4> value_coeffs_about(std::size_t i, double x) const {
        const auto& c = coef_[i];
        double v0 = ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
        double v1 = (3.0 * c[3] * x + 2.0 * c[2]) * x + c[1];
        double v2 = 3.0 * c[3] * x + c[2];
        double v3 = c[3];
        return {v0, v1, v2, v3};
    }

private:
    std::vector<double> breaks_;
    std::vector<std::array<double, 4>> coef_;
};

namespace detail {

// Accumulate int over [lo,hi] (one side of x) of A(x,s) * poly(s) ds, where the
// polynomial is given by centered coefficients about x.
inline double side_integral(const PiecewiseField& f, double lo, double hi, double x, double alpha,
                            double l_side, bool derivative_poly) {
    if (hi - lo <= 0.0) return 0.0;
    double acc = 0.0;
    std::size_t i0 = f.locate(lo + 1e-15 * (hi - lo));
    std::size_t i1 = f.locate(hi - 1e-15 * (hi - lo));
    for (std::size_t i = i0; i <= i1; ++i) {
        double a = std::max(lo, f.breaks()[i]);
        double b = std::min(hi, f.breaks()[i + 1]);
        if (b - a <= 0.0) continue;
        auto d = derivative_poly ? f.derivative_coeffs_about(i, x) : f.value_coeffs_about(i, x);
        int deg = derivative_poly ? 2 : 3;
        auto mu = kernel_moments_about_x(a, b, x, alpha, l_side, deg);
        for (int j = 0; j <= deg; ++j) acc += d[j] * mu[j];
    }
    return acc;
}

}  // namespace detail

/// Riesz-Caputo fractional derivative of a piecewise-polynomial field.
/// A degenerate side (l = 0, point on a boundary) contributes half the local
/// derivative, the limit of the concentrating kernel.
inline double rc_derivative(const PiecewiseField& f, double x, double alpha, const Horizon& hz) {
    double span = f.end() - f.start();
    if (x - hz.l_A < f.start() - 1e-12 * span || x + hz.l_B > f.end() + 1e-12 * span)
        throw std::domain_error("rc_derivative: horizon extends outside field support");
    if (alpha == 1.0) return f.derivative(x);
    double acc = 0.0;
    if (hz.l_A > 0.0)
        acc += detail::side_integral(f, x - hz.l_A, x, x, alpha, hz.l_A, true);
    else
        acc += 0.5 * f.derivative(x);
    if (hz.l_B > 0.0)
        acc += detail::side_integral(f, x, x + hz.l_B, x, alpha, hz.l_B, true);
    else
        acc += 0.5 * f.derivative(x);
    return acc;
}

/// Riesz-type Riemann-Liouville fractional integral appearing in the strong
/// form: the left-reaching part (length l_B) carries the l_B^(alpha-1) weight
/// and vice versa (adjoint pairing of Eq-15 type operators).
inline double rrl_fractional_integral(const PiecewiseField& f, double x, double alpha, const Horizon& hz) {
    double acc = 0.0;
    if (hz.l_B > 0.0) acc += detail::side_integral(f, x - hz.l_B, x, x, alpha, hz.l_B, false);
    if (hz.l_A > 0.0) acc += detail::side_integral(f, x, x + hz.l_A, x, alpha, hz.l_A, false);
    if (hz.l_A <= 0.0) acc += 0.5 * f.value(x);
    if (hz.l_B <= 0.0) acc += 0.5 * f.value(x);
    return acc;
}

/// Riesz-type Riemann-Liouville derivative of a resultant field, computed as
/// d/dx of the analytically integrated fractional integral by central
/// differences. Used by the strong-form residual checker only.
inline double rrl_derivative(const PiecewiseField& f, double x, double alpha, const Horizon& hz,
                             double step = 0.0) {
    double span = f.end() - f.start();
    if (alpha == 1.0) {
        if (x < f.start() - 1e-12 * span || x > f.end() + 1e-12 * span)
            throw std::domain_error("rrl_derivative: x outside field support");
        return f.derivative(x);
    }
    if (step <= 0.0) {
        double w = span;
        for (std::size_t i = 0; i + 1 < f.breaks().size(); ++i)
            w = std::min(w, f.breaks()[i + 1] - f.breaks()[i]);
        step = w / 100.0;
    }
    if (x - hz.l_B - step < f.start() - 1e-12 * span || x + hz.l_A + step > f.end() + 1e-12 * span)
        throw std::domain_error("rrl_derivative: horizon extends outside field support");
    double ip = rrl_fractional_integral(f, x + step, alpha, hz);
    double im = rrl_fractional_integral(f, x - step, alpha, hz);
    return (ip - im) / (2.0 * step);
}

}  // namespace ffem
