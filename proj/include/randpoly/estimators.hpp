#pragma once

// Monte Carlo estimators of the intrinsic-volume deficit
// V_j(K) - E[V_j(K_n)] by three routes (direct hull measure, support
// averaging, projection membership), the cap profile checker, ball
// calibration of the universal constants, and log-log rate fitting.

#include <cmath>
#include <optional>
#include <vector>

#include "randpoly/functionals.hpp"
#include "randpoly/hull.hpp"
#include "randpoly/parallel.hpp"
#include "randpoly/sampling.hpp"

namespace randpoly {

enum class Route { direct, support, projection };

inline const char* route_name(Route r) {
    switch (r) {
        case Route::direct: return "direct";
        case Route::support: return "support";
        case Route::projection: return "projection";
    }
    return "?";
}

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
    int reps = 0;
    int n = 0;
    Route route = Route::direct;
};

namespace detail {

inline Estimate fold_estimate(const std::vector<double>& xs, int n, Route route) {
    const MonteCarloValue v = fold_mean(xs);
    return Estimate{v.mean, v.se, v.reps, n, route};
}

// 128 base directions whose +-u pairs cover the sphere roughly uniformly;
// a Haar rotation per replicate removes the fixed-grid bias.
inline std::vector<Vec> direction_set(int d, RandomStream& rng, int count = 128) {
    std::vector<Vec> dirs;
    dirs.reserve(static_cast<size_t>(count));
    if (d == 2) {
        const double off = rng.uniform();
        for (int i = 0; i < count; ++i) {
            const double th = kPi * (i + off) / count;  // half circle; antipodes added later
            dirs.push_back(Vec{std::cos(th), std::sin(th)});
        }
        return dirs;
    }
    if (d == 3) {
        const Frame R = random_rotation(3, rng);
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - (2.0 * i + 1.0) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = 2.0 * kPi * i / golden;
            dirs.push_back(apply_rotation(R, Vec{r * std::cos(phi), r * std::sin(phi), z}));
        }
        return dirs;
    }
    for (int i = 0; i < count; ++i) dirs.push_back(random_unit_vector(d, rng));
    return dirs;
}

}  // namespace detail

// Deficit of the mean width functional via the support identity
//   V_1(K) - V_1(K_n) = (1/alpha_{d-1}) integral over S^{d-1} of (h_K - h_{K_n}).
// Directions are averaged per cloud in antithetic +-u pairs.
inline Estimate deficit_support_route(const Body& body, const Density& density, int n, int reps,
                                      const SeedSpec& seed, int threads = 1) {
    const int d = dim(body);
    const double factor = unit_sphere_area(d) / alpha(d - 1);
    std::vector<double> vals(static_cast<size_t>(reps));
    parallel_replicates(reps, threads, [&](int k) {
        RandomStream rng = derive_stream(seed, static_cast<std::uint64_t>(k));
        const CloudSample cloud = sample_cloud(body, density, n, rng);
        const auto dirs = detail::direction_set(d, rng);
        double acc = 0.0;
        for (const Vec& u : dirs) {
            double hi = -1e300, lo = 1e300;
            for (const Vec& x : cloud.points) {
                const double t = dot(x, u);
                hi = std::max(hi, t);
                lo = std::min(lo, t);
            }
            acc += (support(body, u) - hi) + (support(body, -1.0 * u) + lo);
        }
        vals[static_cast<size_t>(k)] = factor * acc / (2.0 * dirs.size());
    });
    return detail::fold_estimate(vals, n, Route::support);
}

// Direct evaluation of the deficit: exact hull measures for j = d in
// dimensions 2 and 3, the support identity for j = 1.
inline Estimate deficit_direct(const Body& body, const Density& density, int j, int n, int reps,
                               const SeedSpec& seed, int threads = 1) {
    const int d = dim(body);
    if (reps < 2) throw std::invalid_argument("deficit_direct: reps must be >= 2");
    if (j == 1 && d >= 2 && j != d) return deficit_support_route(body, density, n, reps, seed, threads);
    if (!(j == d && d <= 3))
        throw std::invalid_argument(
            "deficit_direct: only j = d (d <= 3) or j = 1; use deficit_projection instead");

    const double vK = intrinsic_volume_analytic(body, d)->value;
    std::vector<double> vals(static_cast<size_t>(reps));
    parallel_replicates(reps, threads, [&](int k) {
        // a fresh stream far outside the replicate range backs up rare hull failures
        for (int attempt = 0;; ++attempt) {
            RandomStream rng = derive_stream(
                seed, static_cast<std::uint64_t>(k) +
                          static_cast<std::uint64_t>(attempt) * 0x80000000ULL);
            const CloudSample cloud = sample_cloud(body, density, n, rng);
            try {
                const double m = d == 2 ? hull_measure_2d(cloud.points)
                                        : hull_measure_3d(cloud.points).first;
                vals[static_cast<size_t>(k)] = vK - m;
                return;
            } catch (const numeric_error&) {
                if (attempt >= 3) throw;
            }
        }
    });
    return detail::fold_estimate(vals, n, Route::direct);
}

// Projection-membership route: the deficit written as a Haar average over
// j-subspaces of the shadow measure not covered by the projected cloud,
//   coef * E_L E_cloud [ H^j { y in K|L : y not in K_n|L } ].
inline Estimate deficit_projection(const Body& body, const Density& density, int j, int n,
                                   int reps, int y_samples, const SeedSpec& seed,
                                   int threads = 1) {
    const int d = dim(body);
    if (j < 1 || j > d) throw std::invalid_argument("deficit_projection: j out of range");
    if (reps < 2) throw std::invalid_argument("deficit_projection: reps must be >= 2");
    const double coef = kubota_coefficient(d, j);
    std::vector<double> vals(static_cast<size_t>(reps));
    parallel_replicates(reps, threads, [&](int k) {
        RandomStream rng = derive_stream(seed, static_cast<std::uint64_t>(k));
        const Frame L = j == d ? identity_frame(d) : random_subspace(d, j, rng);
        const ShadowOracle shadow(body, L);
        const CloudSample cloud = sample_cloud(body, density, n, rng);
        std::vector<Vec> proj(cloud.points.size());
        for (size_t i = 0; i < cloud.points.size(); ++i) proj[i] = project(cloud.points[i], L);
        Vec y(j);
        int uncovered = 0;
        for (int s = 0; s < y_samples; ++s) {
            for (int i = 0; i < j; ++i) y[i] = rng.uniform(shadow.box_lo()[i], shadow.box_hi()[i]);
            if (!shadow.contains(y)) continue;
            if (!in_hull(proj, y).inside) ++uncovered;
        }
        vals[static_cast<size_t>(k)] =
            coef * shadow.box_volume() * static_cast<double>(uncovered) / y_samples;
    });
    return detail::fold_estimate(vals, n, Route::projection);
}

// ---- weighted least squares ----

struct WlsFit {
    double intercept = 0.0;
    double slope = 0.0;
    double se_intercept = 0.0;
    double se_slope = 0.0;
    double chi2 = 0.0;
};

namespace detail {
inline WlsFit wls_linear(std::span<const double> x, std::span<const double> y,
                         std::span<const double> w) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
        sxx += w[i] * x[i] * x[i];
        sxy += w[i] * x[i] * y[i];
    }
    const double det = sw * sxx - sx * sx;
    if (det <= 0) throw numeric_error("wls_linear: singular fit");
    WlsFit f;
    f.slope = (sw * sxy - sx * sy) / det;
    f.intercept = (sxx * sy - sx * sxy) / det;
    f.se_intercept = std::sqrt(sxx / det);
    f.se_slope = std::sqrt(sw / det);
    for (size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        f.chi2 += w[i] * r * r;
    }
    return f;
}
}  // namespace detail

// ---- cap profile ----

struct CapProfilePoint {
    double t;
    double s;
    double se;
};

struct CapProfileResult {
    BoundaryPoint x;
    std::vector<CapProfilePoint> grid;
    double fitted_limit = 0.0;            // extrapolated t -> 0 limit of t^{-(d-1)/2} s(t)
    std::optional<double> closed_form;    // rho(x) 2^{(d-1)/2} <x,u>^{(d-1)/2} H^{-1/2} alpha_{d-1}
    double G_x = 0.0;
    bool diverging = false;               // flat point: the rescaled mass blows up as t -> 0
};

// Rescaled cap-mass profile t^{-(d-1)/2} s(t) on a grid descending toward 0,
// extrapolated linearly in t and compared against the closed-form limit.
inline CapProfileResult cap_profile(const Body& body, const Density& density,
                                    const BoundaryPoint& x, std::span<const double> t_grid,
                                    const SeedSpec& seed, int num_samples = 1000000) {
    const int d = dim(body);
    const auto roll = rolling_radius(body);
    if (!roll) throw unsupported_error("cap_profile: body has no rolling ball");
    const double t_max = *roll / circumradius(body);
    if (t_grid.size() < 2) throw std::invalid_argument("cap_profile: need >= 2 grid points");
    for (size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0 && t_grid[i] < t_max))
            throw std::invalid_argument("cap_profile: grid outside (0, rolling/circumradius)");
        if (i > 0 && t_grid[i] >= t_grid[i - 1])
            throw std::invalid_argument("cap_profile: grid must descend toward 0");
    }

    RandomStream rng = derive_stream(seed, 0);
    const auto masses = cap_mass_grid(body, density, x, t_grid, rng, num_samples);

    CapProfileResult out;
    out.x = x;
    const double half = 0.5 * (d - 1);
    std::vector<double> ts, ratio, w, logt, logr, wlog;
    for (size_t i = 0; i < t_grid.size(); ++i) {
        out.grid.push_back({t_grid[i], masses[i].value, masses[i].se});
        const double scale = std::pow(t_grid[i], -half);
        const double r = masses[i].value * scale;
        const double rse = std::max(masses[i].se * scale, 1e-12 * std::max(r, 1e-12));
        ts.push_back(t_grid[i]);
        ratio.push_back(r);
        w.push_back(1.0 / (rse * rse));
        if (masses[i].value > 0) {
            logt.push_back(std::log(t_grid[i]));
            logr.push_back(std::log(r));
            wlog.push_back(1.0);
        }
    }
    const auto fit = detail::wls_linear(ts, ratio, w);
    out.fitted_limit = fit.intercept;

    if (logt.size() >= 2) {
        const auto lfit = detail::wls_linear(logt, logr, wlog);
        out.diverging = lfit.slope < -0.25;
    }

    const double g = gauss_curvature(x);
    const double rho = density.value(x);
    out.G_x = std::pow(alpha(d - 1), -1.0 / (d - 1)) * std::pow(rho, -1.0 / (d - 1)) *
              std::pow(g, 0.5 / (d - 1));
    if (g > 0)
        out.closed_form = rho * std::pow(2.0 * dot(x.x, x.u), half) / std::sqrt(g) * alpha(d - 1);
    return out;
}

// ---- ball calibration and rate fits ----

struct Calibration {
    int j = 0;
    int d = 0;
    double c = 0.0;
    double se = 0.0;
    std::vector<int> n_grid;
};

// Estimates the universal constant c^{(j,d)} from the ball with uniform
// density: deficit(n) * n^{2/(d-1)} tends to c * I_j, fitted with a
// first-order correction a + b n^{-kappa}, kappa = 2/(d-1).
inline Calibration calibrate_c(int j, int d, std::span<const int> n_grid, int reps,
                               const SeedSpec& seed, int threads = 1, double radius = 1.0,
                               int y_samples = 256) {
    if (n_grid.size() < 3) throw std::invalid_argument("calibrate_c: need >= 3 grid points");
    for (size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw std::invalid_argument("calibrate_c: n_grid must be strictly increasing");

    const Body ball = Ball{d, radius};
    const Density uni = make_density(ball, DensitySpec::uniform());
    const double kappa = 2.0 / (d - 1);

    std::vector<double> xs, ys, ws;
    for (size_t i = 0; i < n_grid.size(); ++i) {
        const int n = n_grid[i];
        const SeedSpec cell = with_stream_base(seed, static_cast<std::uint64_t>(i) << 32);
        Estimate est;
        if (j == d && d <= 3)
            est = deficit_direct(ball, uni, j, n, reps, cell, threads);
        else if (j == 1)
            est = deficit_support_route(ball, uni, n, reps, cell, threads);
        else
            est = deficit_projection(ball, uni, j, n, reps, y_samples, cell, threads);
        const double scale = std::pow(n, kappa);
        xs.push_back(std::pow(n, -kappa));
        ys.push_back(est.mean * scale);
        const double se = std::max(est.se * scale, 1e-12);
        ws.push_back(1.0 / (se * se));
    }
    const auto fit = detail::wls_linear(xs, ys, ws);
    const double I = ball_limit_integral(d, j, radius);
    return Calibration{j, d, fit.intercept / I, fit.se_intercept / I,
                       std::vector<int>(n_grid.begin(), n_grid.end())};
}

struct RateFit {
    double exponent = 0.0;
    double log_constant = 0.0;
    double exponent_ci_lo = 0.0;
    double exponent_ci_hi = 0.0;
    double residual_rms = 0.0;
    std::vector<int> n_grid;
};

// Weighted log-log regression of deficit means against n; weights come from
// the delta method, var(log m) = (se/m)^2.
inline RateFit fit_rate(std::span<const std::pair<int, Estimate>> pairs) {
    if (pairs.size() < 3) throw std::invalid_argument("fit_rate: need >= 3 points");
    std::vector<double> x, y, w;
    RateFit out;
    for (const auto& [n, est] : pairs) {
        if (!(est.mean > 0)) throw std::invalid_argument("fit_rate: nonpositive mean");
        x.push_back(std::log(static_cast<double>(n)));
        y.push_back(std::log(est.mean));
        const double rel = est.se > 0 ? est.se / est.mean : 1e-9;
        w.push_back(1.0 / (rel * rel));
        out.n_grid.push_back(n);
    }
    const auto fit = detail::wls_linear(x, y, w);
    out.exponent = fit.slope;
    out.log_constant = fit.intercept;
    out.exponent_ci_lo = fit.slope - 1.96 * fit.se_slope;
    out.exponent_ci_hi = fit.slope + 1.96 * fit.se_slope;
    out.residual_rms = std::sqrt(fit.chi2 / static_cast<double>(x.size()));
    return out;
}

}  // namespace randpoly
