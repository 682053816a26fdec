#pragma once

// 1-D quadrature building blocks: Gauss-Legendre nodes by Newton iteration
// and a midpoint rule for smooth periodic integrands.

#include <cmath>
#include <functional>
#include <vector>

#include "randpoly/constants.hpp"

namespace randpoly {

struct QuadPoint {
    double x;
    double w;
};

// Gauss-Legendre nodes/weights on [-1, 1].
inline std::vector<QuadPoint> gauss_legendre(int n) {
    std::vector<QuadPoint> pts(static_cast<size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        pts[static_cast<size_t>(i)] = {-x, w};
        pts[static_cast<size_t>(n - 1 - i)] = {x, w};
    }
    return pts;
}

inline std::vector<QuadPoint> gauss_legendre(int n, double a, double b) {
    auto pts = gauss_legendre(n);
    for (auto& p : pts) {
        p.x = 0.5 * (b - a) * p.x + 0.5 * (a + b);
        p.w *= 0.5 * (b - a);
    }
    return pts;
}

inline double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
    double s = 0.0;
    for (const auto& p : gauss_legendre(n, a, b)) s += p.w * f(p.x);
    return s;
}

// Midpoint rule on [a, b]; spectrally accurate for smooth (b-a)-periodic f.
inline double integrate_periodic(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
    return s * h;
}

}  // namespace randpoly
