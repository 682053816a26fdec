#pragma once

#include <cmath>
#include <stdexcept>

namespace randpoly {

constexpr double kPi = 3.14159265358979323846;

// Volume of the unit ball in R^j: pi^{j/2} / Gamma(j/2 + 1).
inline double alpha(int j) {
    if (j < 0) throw std::invalid_argument("alpha: j must be >= 0");
    return std::pow(kPi, 0.5 * j) / std::tgamma(0.5 * j + 1.0);
}

// Surface content of the unit sphere S^{d-1}.
inline double unit_sphere_area(int d) { return d * alpha(d); }

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace randpoly
