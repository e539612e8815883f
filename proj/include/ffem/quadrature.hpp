#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ffem {

struct QuadraturePoint {
    double xi;  // abscissa in [0,1]
    double w;   // weight on [0,1]
};

// Gauss-Legendre rule mapped to [0,1]. Nodes via Newton iteration on P_n.
inline std::vector<QuadraturePoint> gauss_legendre_01(int n) {
    if (n < 1 || n > 64) throw std::invalid_argument("gauss_legendre_01: order out of range");
    std::vector<QuadraturePoint> pts(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev initial guess on [-1,1]
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        pts[i] = {0.5 * (1.0 - x), 0.5 * w};          // mirrored node first
        pts[n - 1 - i] = {0.5 * (1.0 + x), 0.5 * w};
    }
    return pts;
}

}  // namespace ffem
