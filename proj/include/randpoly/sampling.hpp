#pragma once

// Sampling boundary points according to a continuous positive density with
// respect to the boundary measure. Everything is rejection sampling against
// the uniform boundary sampler with an explicit envelope bound, so
// correctness is easy to audit and envelope violations are detected loudly.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "randpoly/bodies.hpp"
#include "randpoly/rng.hpp"

namespace randpoly {

struct envelope_error : numeric_error {
    using numeric_error::numeric_error;
};

enum class DensityKind { uniform, curvature_power, perturbed };

struct BumpSpec {
    Vec center;        // point on the boundary
    double amplitude;  // > -1 keeps the density positive
    double width;      // Gaussian width in ambient distance
};

// Density description. A perturbed density multiplies a base density
// (uniform or curvature-power) by 1 + amplitude * exp(-|x-c|^2 / (2 w^2)).
struct DensitySpec {
    DensityKind kind = DensityKind::uniform;
    double exponent = 0.0;  // curvature-power beta
    DensityKind base_kind = DensityKind::uniform;
    double base_exponent = 0.0;
    std::optional<BumpSpec> bump;

    static DensitySpec uniform() { return {}; }
    static DensitySpec curvature_power(double beta) {
        DensitySpec s;
        s.kind = DensityKind::curvature_power;
        s.exponent = beta;
        return s;
    }
    static DensitySpec perturbed(const DensitySpec& base, const Vec& center, double amplitude,
                                 double width) {
        if (base.kind == DensityKind::perturbed)
            throw std::invalid_argument("density: perturbed base must be uniform or curvature_power");
        DensitySpec s;
        s.kind = DensityKind::perturbed;
        s.base_kind = base.kind;
        s.base_exponent = base.exponent;
        s.bump = BumpSpec{center, amplitude, width};
        return s;
    }
};

inline std::string density_kind_name(const DensitySpec& s) {
    switch (s.kind) {
        case DensityKind::uniform: return "uniform";
        case DensityKind::curvature_power: return "curvature_power";
        case DensityKind::perturbed: return "perturbed";
    }
    return "?";
}

namespace detail {
inline double unnorm_base(DensityKind kind, double exponent, const BoundaryPoint& bp) {
    if (kind == DensityKind::uniform || exponent == 0.0) return 1.0;
    return std::pow(gauss_curvature(bp), exponent);
}
}  // namespace detail

// Unnormalized density value at a boundary point.
inline double density_unnorm(const DensitySpec& spec, const BoundaryPoint& bp) {
    if (spec.kind == DensityKind::perturbed) {
        const double base = detail::unnorm_base(spec.base_kind, spec.base_exponent, bp);
        const auto& b = *spec.bump;
        const double r2 = norm2(bp.x - b.center);
        return base * (1.0 + b.amplitude * std::exp(-r2 / (2.0 * b.width * b.width)));
    }
    return detail::unnorm_base(spec.kind, spec.exponent, bp);
}

// A density prepared for a specific body: normalizer Z and rejection
// envelope M >= sup of the unnormalized density.
struct Density {
    DensitySpec spec;
    double normalizer = 1.0;  // Z = integral of the unnormalized density
    double envelope = 1.0;    // M
    bool normalizer_numeric = false;

    double unnorm(const BoundaryPoint& bp) const { return density_unnorm(spec, bp); }
    double value(const BoundaryPoint& bp) const { return unnorm(bp) / normalizer; }
};

inline BoundaryPoint sample_boundary_uniform(const Body& body, RandomStream& rng);

namespace detail {

inline void validate_density_for_body(const Body& body, const DensitySpec& spec) {
    const bool power = (spec.kind == DensityKind::curvature_power && spec.exponent != 0.0) ||
                       (spec.kind == DensityKind::perturbed &&
                        spec.base_kind == DensityKind::curvature_power && spec.base_exponent != 0.0);
    if (power && !(std::holds_alternative<Ball>(body) || std::holds_alternative<Ellipsoid>(body)))
        throw std::invalid_argument(
            "density: curvature_power is not positive on bodies with flat boundary parts "
            "(capsule cylinder / cube facets have zero Gauss curvature)");
    if (spec.kind == DensityKind::perturbed) {
        const auto& b = *spec.bump;
        if (!(b.width > 0)) throw std::invalid_argument("density.bump.width: must be > 0");
        if (!(b.amplitude > -1.0))
            throw std::invalid_argument("density.bump.amplitude: must be > -1 to stay positive");
        normal_and_curvatures(body, b.center);  // throws if the center is off the boundary
    }
}

// Supremum sweep for the envelope; exact for uniform and for the ball.
inline double envelope_bound(const Body& body, const DensitySpec& spec, int d) {
    double bump_factor = 1.0;
    DensityKind kind = spec.kind;
    double expo = spec.exponent;
    if (spec.kind == DensityKind::perturbed) {
        bump_factor = std::max(1.0, 1.0 + spec.bump->amplitude);
        kind = spec.base_kind;
        expo = spec.base_exponent;
    }
    if (kind == DensityKind::uniform || expo == 0.0) return bump_factor;

    if (const auto* b = std::get_if<Ball>(&body))
        return bump_factor * std::pow(std::pow(b->radius, -(d - 1)), expo);

    const auto& e = std::get<Ellipsoid>(body);
    // Gauss curvature extremes sit at the axis endpoints; sweep those exactly
    // and pad for interior variation.
    double m = 0.0;
    for (int i = 0; i < d; ++i) {
        Vec x(d);
        x[i] = e.semiaxes[static_cast<size_t>(i)];
        const auto bp = normal_and_curvatures(body, x);
        m = std::max(m, std::pow(gauss_curvature(bp), expo));
    }
    return 1.25 * bump_factor * m;
}

inline std::pair<double, bool> density_normalizer(const Body& body, const DensitySpec& spec) {
    if (spec.kind == DensityKind::uniform) return {boundary_area(body), false};
    if (dim(body) <= 3) {
        double z = 0.0;
        for (const auto& node : boundary_quadrature(body, 2)) z += node.weight * density_unnorm(spec, node.bp);
        return {z, true};
    }
    // Monte Carlo fallback (fixed internal stream keeps Density construction deterministic)
    RandomStream rng = derive_stream(SeedSpec{0x5EEDFACEULL, 0}, 77);
    const int n = 200000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += density_unnorm(spec, sample_boundary_uniform(body, rng));
    return {boundary_area(body) * s / n, true};
}

}  // namespace detail

inline Density make_density(const Body& body, const DensitySpec& spec) {
    detail::validate_density_for_body(body, spec);
    Density den;
    den.spec = spec;
    den.envelope = detail::envelope_bound(body, spec, dim(body));
    auto [z, numeric] = detail::density_normalizer(body, spec);
    if (!(z > 0)) throw std::invalid_argument("density: normalizer must be positive");
    den.normalizer = z;
    den.normalizer_numeric = numeric;
    return den;
}

// ---- uniform boundary sampler, per body kind ----

inline constexpr int kRejectionCap = 1000000;

inline BoundaryPoint sample_boundary_uniform(const Body& body, RandomStream& rng) {
    const int d = dim(body);

    if (const auto* b = std::get_if<Ball>(&body)) {
        BoundaryPoint bp;
        bp.u = random_unit_vector(d, rng);
        bp.x = b->radius * bp.u;
        bp.curvature_count = d - 1;
        for (int i = 0; i < d - 1; ++i) bp.k[static_cast<size_t>(i)] = 1.0 / b->radius;
        return bp;
    }

    if (const auto* e = std::get_if<Ellipsoid>(&body)) {
        // map the sphere and accept against the surface Jacobian
        const double amin = e->min_axis();
        for (int tries = 0; tries < kRejectionCap; ++tries) {
            const Vec u = random_unit_vector(d, rng);
            double s = 0.0;
            for (int i = 0; i < d; ++i) {
                const double t = u[i] / e->semiaxes[static_cast<size_t>(i)];
                s += t * t;
            }
            if (rng.uniform() <= amin * std::sqrt(s)) {
                Vec x(d);
                for (int i = 0; i < d; ++i) x[i] = e->semiaxes[static_cast<size_t>(i)] * u[i];
                return normal_and_curvatures(body, x);
            }
        }
        throw envelope_error("sample_boundary_uniform: ellipsoid rejection loop exceeded");
    }

    if (const auto* c = std::get_if<Capsule>(&body)) {
        const double r = c->cap_radius, half = 0.5 * c->core_length;
        const double cap_area = unit_sphere_area(d) * std::pow(r, d - 1);
        const double side_area = c->core_length * (d - 1) * alpha(d - 1) * std::pow(r, d - 2);
        BoundaryPoint bp;
        bp.curvature_count = d - 1;
        if (rng.uniform() * (cap_area + side_area) < cap_area) {
            const Vec u = random_unit_vector(d, rng);
            Vec x = r * u;
            x[c->axis] += u[c->axis] >= 0 ? half : -half;
            bp.x = x;
            bp.u = u;
            for (int i = 0; i < d - 1; ++i) bp.k[static_cast<size_t>(i)] = 1.0 / r;
        } else {
            // cylinder point: uniform along the axis, uniform circular direction
            Vec w(d - 1);
            do {
                for (int i = 0; i < d - 1; ++i) w[i] = rng.gaussian();
            } while (norm2(w) < 1e-24);
            w = normalized(w);
            Vec x(d), u(d);
            x[c->axis] = rng.uniform(-half, half);
            int idx = 0;
            for (int i = 0; i < d; ++i) {
                if (i == c->axis) continue;
                x[i] = r * w[idx];
                u[i] = w[idx];
                ++idx;
            }
            bp.x = x;
            bp.u = u;
            bp.k[0] = 0.0;
            for (int i = 1; i < d - 1; ++i) bp.k[static_cast<size_t>(i)] = 1.0 / r;
        }
        return bp;
    }

    const auto& q = std::get<Cube>(body);
    const double half = 0.5 * q.side;
    for (int tries = 0; tries < kRejectionCap; ++tries) {
        const int facet = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * d)));
        const int axis = facet / 2;
        BoundaryPoint bp;
        bp.curvature_count = d - 1;
        Vec x(d), u(d);
        x[axis] = facet % 2 == 0 ? half : -half;
        u[axis] = facet % 2 == 0 ? 1.0 : -1.0;
        bool on_edge = false;
        for (int i = 0; i < d; ++i) {
            if (i == axis) continue;
            x[i] = rng.uniform(-half, half);
            if (std::abs(std::abs(x[i]) - half) < 1e-12 * q.side) on_edge = true;
        }
        if (on_edge) continue;  // measure-zero edge points are resampled
        bp.x = x;
        bp.u = u;
        return bp;
    }
    throw envelope_error("sample_boundary_uniform: cube edge rejection loop exceeded");
}

// Draw from the prepared density by rejection against the uniform sampler.
inline BoundaryPoint sample_boundary(const Body& body, const Density& density, RandomStream& rng) {
    if (density.spec.kind == DensityKind::uniform) return sample_boundary_uniform(body, rng);
    for (int tries = 0; tries < kRejectionCap; ++tries) {
        BoundaryPoint bp = sample_boundary_uniform(body, rng);
        const double f = density.unnorm(bp);
        if (f > density.envelope * (1.0 + 1e-9)) {
            std::string msg = "sample_boundary: envelope violated at x = (";
            for (int i = 0; i < bp.x.dim(); ++i)
                msg += (i ? ", " : "") + std::to_string(bp.x[i]);
            throw envelope_error(msg + ")");
        }
        if (rng.uniform() * density.envelope <= f) return bp;
    }
    throw envelope_error("sample_boundary: rejection loop exceeded");
}

struct CloudSample {
    std::vector<Vec> points;
    int n() const { return static_cast<int>(points.size()); }
};

inline CloudSample sample_cloud(const Body& body, const Density& density, int n, RandomStream& rng) {
    if (n < 1) throw std::invalid_argument("sample_cloud: n must be >= 1");
    CloudSample cloud;
    cloud.points.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) cloud.points.push_back(sample_boundary(body, density, rng).x);
    return cloud;
}

// ---- cap mass ----

struct ValueWithError {
    double value;
    double se;
};

// Exact boundary-measure fraction of a cap of relative depth t on the ball
// with the uniform density.
inline double ball_uniform_cap_mass(int d, double t) {
    if (d == 2) return std::acos(1.0 - t) / kPi;
    if (d == 3) return 0.5 * t;
    const double theta0 = std::acos(1.0 - t);
    auto f = [d](double th) { return std::pow(std::sin(th), d - 2); };
    return integrate_gl(f, 0.0, theta0, 64) / integrate_gl(f, 0.0, kPi, 64);
}

// Probability mass s(t) of the boundary part cut off by the cap
// C(x, t) = K intersect { z : <u(x), z> >= (1-t) <u(x), x> },
// for each t in the grid. One sample batch is shared across the grid.
inline std::vector<ValueWithError> cap_mass_grid(const Body& body, const Density& density,
                                                 const BoundaryPoint& x, std::span<const double> ts,
                                                 RandomStream& rng, int num_samples = 1000000) {
    for (double t : ts)
        if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("cap_mass: need 0 < t < 1");

    std::vector<ValueWithError> out(ts.size());
    if (std::holds_alternative<Ball>(body) && density.spec.kind == DensityKind::uniform) {
        for (size_t i = 0; i < ts.size(); ++i) out[i] = {ball_uniform_cap_mass(dim(body), ts[i]), 0.0};
        return out;
    }
    const double base = dot(x.u, x.x);
    std::vector<std::int64_t> hits(ts.size(), 0);
    for (int s = 0; s < num_samples; ++s) {
        const BoundaryPoint z = sample_boundary(body, density, rng);
        const double h = dot(x.u, z.x);
        for (size_t i = 0; i < ts.size(); ++i)
            if (h >= (1.0 - ts[i]) * base) ++hits[i];
    }
    for (size_t i = 0; i < ts.size(); ++i) {
        const double p = static_cast<double>(hits[i]) / num_samples;
        out[i] = {p, std::sqrt(std::max(p * (1.0 - p), 0.0) / num_samples)};
    }
    return out;
}

inline ValueWithError cap_mass(const Body& body, const Density& density, const BoundaryPoint& x,
                               double t, RandomStream& rng, int num_samples = 1000000) {
    const double ts[1] = {t};
    return cap_mass_grid(body, density, x, ts, rng, num_samples)[0];
}

}  // namespace randpoly
