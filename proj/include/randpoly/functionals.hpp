#pragma once

// Deterministic functionals of a body/density pair: intrinsic volumes via
// projection averaging, the limiting curvature integral that governs the
// hull approximation error, its closed-form constants, and the
// curvature-power density functional.

#include <functional>
#include <optional>
#include <string>

#include "randpoly/bodies.hpp"
#include "randpoly/parallel.hpp"
#include "randpoly/quadrature.hpp"
#include "randpoly/sampling.hpp"

namespace randpoly {

// Universal constant of the volume law (j = d), known in closed form:
// c^{(d,d)} = (d-1)^{(d+1)/(d-1)} Gamma(d+1+2/(d-1))
//             / (2 (d+1)! [(d-1) alpha_{d-1}]^{2/(d-1)}).
inline double schuett_werner_constant(int d) {
    if (d < 2) throw std::invalid_argument("schuett_werner_constant: d must be >= 2");
    const double p = 2.0 / (d - 1);
    return std::pow(d - 1.0, 0.5 * (d + 1) * p) * std::tgamma(d + 1 + p) /
           (2.0 * factorial(d + 1) * std::pow((d - 1) * alpha(d - 1), p));
}

// binom(d,j) alpha_d / (alpha_j alpha_{d-j}); the projection-averaging factor.
inline double kubota_coefficient(int d, int j) {
    return binomial(d, j) * alpha(d) / (alpha(j) * alpha(d - j));
}

struct MonteCarloValue {
    double mean = 0.0;
    double se = 0.0;
    int reps = 0;
};

namespace detail {
inline MonteCarloValue fold_mean(const std::vector<double>& xs) {
    MonteCarloValue v;
    v.reps = static_cast<int>(xs.size());
    double s = 0.0;
    for (double x : xs) s += x;
    v.mean = s / v.reps;
    double q = 0.0;
    for (double x : xs) q += (x - v.mean) * (x - v.mean);
    v.se = v.reps > 1 ? std::sqrt(q / (v.reps - 1.0) / v.reps) : 0.0;
    return v;
}
}  // namespace detail

// V_j(K) as a Haar average of shadow volumes; each shadow volume is
// estimated by rejection against the support-function bounding box.
inline MonteCarloValue kubota_estimate(const Body& body, int j, int num_subspaces,
                                       int samples_per_subspace, const SeedSpec& seed,
                                       int threads = 1) {
    const int d = dim(body);
    if (j < 1 || j >= d) throw std::invalid_argument("kubota_estimate: need 1 <= j <= d-1");
    const double coef = kubota_coefficient(d, j);
    std::vector<double> vals(static_cast<size_t>(num_subspaces));
    parallel_replicates(num_subspaces, threads, [&](int k) {
        RandomStream rng = derive_stream(seed, static_cast<std::uint64_t>(k));
        const Frame L = random_subspace(d, j, rng);
        const ShadowOracle shadow(body, L);
        Vec y(j);
        int hits = 0;
        for (int s = 0; s < samples_per_subspace; ++s) {
            for (int i = 0; i < j; ++i) y[i] = rng.uniform(shadow.box_lo()[i], shadow.box_hi()[i]);
            if (shadow.contains(y)) ++hits;
        }
        vals[static_cast<size_t>(k)] =
            coef * shadow.box_volume() * static_cast<double>(hits) / samples_per_subspace;
    });
    return detail::fold_mean(vals);
}

struct LimitIntegral {
    double value = 0.0;
    double se = 0.0;
    int j = 0;
    std::string body_kind;
    std::string density_kind;
};

struct QuadSpec {
    int level = 2;          // boundary-quadrature refinement
    int mc_samples = 400000;  // Monte Carlo fallback sample count
    bool force_mc = false;
};

// The curvature integral controlling the first-order hull deficit:
//   I_j = integral over dK of rho^{-2/(d-1)} H_{d-1}^{1/(d-1)} H_{d-j}.
// Regions of zero Gauss curvature contribute nothing (the capsule cylinder
// is skipped exactly); bodies without a rolling ball are rejected.
inline LimitIntegral limit_integral(const Body& body, const Density& density, int j,
                                    const QuadSpec& quad = {}) {
    const int d = dim(body);
    if (j < 1 || j > d) throw std::invalid_argument("limit_integral: j out of range");
    if (!rolling_radius(body))
        throw unsupported_error("limit_integral: no rolling ball, asymptotic law does not apply");

    const double inv_dm1 = 1.0 / (d - 1);
    auto integrand = [&](const BoundaryPoint& bp) {
        const double g = gauss_curvature(bp);
        if (g <= 0.0) return 0.0;
        const auto ev = curvature_functions(bp);
        const double rho = density.value(bp);
        return std::pow(rho, -2.0 * inv_dm1) * std::pow(g, inv_dm1) * ev.H[static_cast<size_t>(d - j)];
    };

    LimitIntegral out;
    out.j = j;
    out.body_kind = kind_name(body);
    out.density_kind = density_kind_name(density.spec);

    if (d <= 3 && !quad.force_mc) {
        double coarse = 0.0, fine = 0.0;
        for (const auto& node : boundary_quadrature(body, quad.level)) coarse += node.weight * integrand(node.bp);
        for (const auto& node : boundary_quadrature(body, 2 * quad.level)) fine += node.weight * integrand(node.bp);
        out.value = fine;
        out.se = std::abs(fine - coarse);
        return out;
    }

    RandomStream rng = derive_stream(SeedSpec{0x11117777ULL, 0}, 5);
    const double area = boundary_area(body);
    std::vector<double> vals(static_cast<size_t>(quad.mc_samples));
    for (int i = 0; i < quad.mc_samples; ++i)
        vals[static_cast<size_t>(i)] = area * integrand(sample_boundary_uniform(body, rng));
    const auto mc = detail::fold_mean(vals);
    out.value = mc.mean;
    out.se = mc.se;
    return out;
}

// Closed form of the limit integral for Ball(R) with the uniform density.
inline double ball_limit_integral(int d, int j, double radius = 1.0) {
    return std::pow(d * alpha(d), (d + 1.0) / (d - 1.0)) * std::pow(radius, j);
}

// First-order prediction of V_j(K) - E[V_j(K_n)]. The constant c^{(j,d)}
// is closed-form for j = d and must come from ball calibration otherwise.
inline double predicted_deficit(const Body& body, const Density& density, int j, int n,
                                std::optional<double> c_jd = std::nullopt,
                                const QuadSpec& quad = {}) {
    const int d = dim(body);
    double c;
    if (j == d)
        c = schuett_werner_constant(d);
    else if (c_jd)
        c = *c_jd;
    else
        throw std::invalid_argument("predicted_deficit: missing calibration for c^{(j,d)}");
    const LimitIntegral I = limit_integral(body, density, j, quad);
    return c * I.value * std::pow(n, -2.0 / (d - 1.0));
}

// Limit integral evaluated at the normalized curvature-power density with
// the given exponent. Minimized (over exponents) at beta = 1/(d+1).
inline double density_functional(const Body& body, double beta, int j, const QuadSpec& quad = {}) {
    const Density den = make_density(body, DensitySpec::curvature_power(beta));
    return limit_integral(body, den, j, quad).value;
}

// ---- projection-average identities ----

// Gradient of the support function (the boundary point with outer normal
// u / |u|); defined a.e. for the smooth bodies handled here.
inline Vec support_gradient(const Body& body, const Vec& u) {
    if (const auto* b = std::get_if<Ball>(&body)) return (b->radius / norm(u)) * u;
    if (const auto* e = std::get_if<Ellipsoid>(&body)) {
        Vec g(e->dim);
        double s = 0.0;
        for (int i = 0; i < e->dim; ++i) {
            const double a2 = e->semiaxes[static_cast<size_t>(i)] * e->semiaxes[static_cast<size_t>(i)];
            g[i] = a2 * u[i];
            s += a2 * u[i] * u[i];
        }
        return (1.0 / std::sqrt(s)) * g;
    }
    if (const auto* c = std::get_if<Capsule>(&body)) {
        Vec g = (c->cap_radius / norm(u)) * u;
        g[c->axis] += 0.5 * c->core_length * (u[c->axis] >= 0 ? 1.0 : -1.0);
        return g;
    }
    throw unsupported_error("support_gradient: not defined for the cube");
}

// Haar average of integral of f over the relative boundary of the shadow,
//   E_L [ integral of f(x(y)) over the (j-1)-boundary of K|L ],
// where x(y) is the boundary point projecting to y. Implemented for j = 1
// (two endpoints) and j = d-1 = 2 in dimension 3 (support-function
// quadrature around the shadow).
inline MonteCarloValue projection_boundary_average(
    const Body& body, int j, const std::function<double(const Vec&)>& f, int frames,
    const SeedSpec& seed, int threads = 1) {
    const int d = dim(body);
    std::vector<double> vals(static_cast<size_t>(frames));
    if (j == 1) {
        parallel_replicates(frames, threads, [&](int k) {
            RandomStream rng = derive_stream(seed, static_cast<std::uint64_t>(k));
            const Vec b = random_unit_vector(d, rng);
            vals[static_cast<size_t>(k)] =
                f(support_gradient(body, b)) + f(support_gradient(body, -1.0 * b));
        });
        return detail::fold_mean(vals);
    }
    if (j == 2 && d == 3) {
        parallel_replicates(frames, threads, [&](int k) {
            RandomStream rng = derive_stream(seed, static_cast<std::uint64_t>(k));
            const Frame L = random_subspace(d, 2, rng);
            const int nphi = 256;
            const double h = 2.0 * kPi / nphi;
            const double dphi = 1e-4;
            double acc = 0.0;
            auto g = [&](double phi) {
                return support(body, std::cos(phi) * L.col(0) + std::sin(phi) * L.col(1));
            };
            for (int i = 0; i < nphi; ++i) {
                const double phi = (i + 0.5) * h;
                const Vec u = std::cos(phi) * L.col(0) + std::sin(phi) * L.col(1);
                // curvature radius of the shadow boundary: g + g''
                const double rc = g(phi) + (g(phi + dphi) - 2.0 * g(phi) + g(phi - dphi)) / (dphi * dphi);
                acc += f(support_gradient(body, u)) * rc * h;
            }
            vals[static_cast<size_t>(k)] = acc;
        });
        return detail::fold_mean(vals);
    }
    throw unsupported_error("projection_boundary_average: only j = 1 or (j, d) = (2, 3)");
}

// The matching boundary-curvature side of the identity:
//   (j alpha_j / (d alpha_d)) integral of f * H_{d-j} over dK.
inline double curvature_boundary_integral(const Body& body, int j,
                                          const std::function<double(const Vec&)>& f,
                                          int level = 2) {
    const int d = dim(body);
    double s = 0.0;
    for (const auto& node : boundary_quadrature(body, level)) {
        const auto ev = curvature_functions(node.bp);
        s += node.weight * f(node.bp.x) * ev.H[static_cast<size_t>(d - j)];
    }
    return j * alpha(j) / (d * alpha(d)) * s;
}

}  // namespace randpoly
