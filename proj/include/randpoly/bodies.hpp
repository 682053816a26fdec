#pragma once

// The convex body abstraction: support function, membership, boundary
// normals and principal curvatures, analytic intrinsic volumes, rolling
// radius, and membership tests for orthogonal shadows.
//
// Four concrete bodies are provided. Ball and Ellipsoid are smooth with
// positive curvature; Capsule (segment + r*ball) is smooth with a rolling
// ball but has zero Gauss curvature on its cylindrical part; Cube has no
// rolling ball at all. All are centered at the origin.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "randpoly/constants.hpp"
#include "randpoly/hull.hpp"
#include "randpoly/linalg.hpp"
#include "randpoly/quadrature.hpp"

namespace randpoly {

struct unsupported_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Ball {
    int dim;
    double radius;
};

struct Ellipsoid {
    int dim;
    std::array<double, kMaxDim> semiaxes{};

    static Ellipsoid of(std::initializer_list<double> axes) {
        Ellipsoid e;
        e.dim = static_cast<int>(axes.size());
        int i = 0;
        for (double a : axes) e.semiaxes[static_cast<size_t>(i++)] = a;
        return e;
    }
    double min_axis() const {
        double m = semiaxes[0];
        for (int i = 1; i < dim; ++i) m = std::min(m, semiaxes[static_cast<size_t>(i)]);
        return m;
    }
    double max_axis() const {
        double m = semiaxes[0];
        for (int i = 1; i < dim; ++i) m = std::max(m, semiaxes[static_cast<size_t>(i)]);
        return m;
    }
};

struct Capsule {
    int dim;
    double cap_radius;
    double core_length;
    int axis = 0;
};

struct Cube {
    int dim;
    double side;
};

using Body = std::variant<Ball, Ellipsoid, Capsule, Cube>;

inline int dim(const Body& body) {
    return std::visit([](const auto& b) { return b.dim; }, body);
}

inline std::string kind_name(const Body& body) {
    struct V {
        std::string operator()(const Ball&) const { return "ball"; }
        std::string operator()(const Ellipsoid&) const { return "ellipsoid"; }
        std::string operator()(const Capsule&) const { return "capsule"; }
        std::string operator()(const Cube&) const { return "cube"; }
    };
    return std::visit(V{}, body);
}

inline void validate_body(const Body& body) {
    const int d = dim(body);
    if (d < 2 || d > kMaxDim) throw dimension_error("body: dimension must be in [2, 10]");
    if (const auto* b = std::get_if<Ball>(&body)) {
        if (!(b->radius > 0)) throw std::invalid_argument("ball: radius must be > 0");
    } else if (const auto* e = std::get_if<Ellipsoid>(&body)) {
        for (int i = 0; i < d; ++i)
            if (!(e->semiaxes[static_cast<size_t>(i)] > 0))
                throw std::invalid_argument("ellipsoid: semiaxes must be > 0");
    } else if (const auto* c = std::get_if<Capsule>(&body)) {
        if (!(c->cap_radius > 0)) throw std::invalid_argument("capsule: cap_radius must be > 0");
        if (c->core_length < 0) throw std::invalid_argument("capsule: core_length must be >= 0");
        if (c->axis < 0 || c->axis >= d) throw std::invalid_argument("capsule: axis out of range");
    } else if (const auto* q = std::get_if<Cube>(&body)) {
        if (!(q->side > 0)) throw std::invalid_argument("cube: side must be > 0");
    }
}

inline double circumradius(const Body& body) {
    struct V {
        double operator()(const Ball& b) const { return b.radius; }
        double operator()(const Ellipsoid& e) const { return e.max_axis(); }
        double operator()(const Capsule& c) const { return 0.5 * c.core_length + c.cap_radius; }
        double operator()(const Cube& q) const { return 0.5 * q.side * std::sqrt(q.dim); }
    };
    return std::visit(V{}, body);
}

// h_K(u) = max_{x in K} <x, u>; positively homogeneous in u.
inline double support(const Body& body, const Vec& u) {
    if (norm2(u) == 0.0) throw std::invalid_argument("support: zero direction");
    struct V {
        const Vec& u;
        double operator()(const Ball& b) const { return b.radius * norm(u); }
        double operator()(const Ellipsoid& e) const {
            double s = 0.0;
            for (int i = 0; i < e.dim; ++i) {
                const double t = e.semiaxes[static_cast<size_t>(i)] * u[i];
                s += t * t;
            }
            return std::sqrt(s);
        }
        double operator()(const Capsule& c) const {
            return 0.5 * c.core_length * std::abs(u[c.axis]) + c.cap_radius * norm(u);
        }
        double operator()(const Cube& q) const {
            double s = 0.0;
            for (int i = 0; i < q.dim; ++i) s += std::abs(u[i]);
            return 0.5 * q.side * s;
        }
    };
    return std::visit(V{u}, body);
}

inline double dist_point_segment(const Vec& p, const Vec& a, const Vec& b) {
    const Vec ab = b - a;
    const double denom = norm2(ab);
    double t = denom > 0 ? dot(p - a, ab) / denom : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

inline std::pair<Vec, Vec> capsule_segment(const Capsule& c) {
    Vec a(c.dim), b(c.dim);
    a[c.axis] = -0.5 * c.core_length;
    b[c.axis] = 0.5 * c.core_length;
    return {a, b};
}

// p in K up to a Euclidean tolerance (ellipsoid: radial inflation that
// covers the Euclidean one).
inline bool contains(const Body& body, const Vec& p, double tol = 1e-9) {
    struct V {
        const Vec& p;
        double tol;
        bool operator()(const Ball& b) const { return norm(p) <= b.radius + tol; }
        bool operator()(const Ellipsoid& e) const {
            double s = 0.0;
            for (int i = 0; i < e.dim; ++i) {
                const double t = p[i] / e.semiaxes[static_cast<size_t>(i)];
                s += t * t;
            }
            return std::sqrt(s) <= 1.0 + tol / e.min_axis();
        }
        bool operator()(const Capsule& c) const {
            auto [a, b] = capsule_segment(c);
            return dist_point_segment(p, a, b) <= c.cap_radius + tol;
        }
        bool operator()(const Cube& q) const {
            for (int i = 0; i < q.dim; ++i)
                if (std::abs(p[i]) > 0.5 * q.side + tol) return false;
            return true;
        }
    };
    return std::visit(V{p, tol}, body);
}

struct BoundaryPoint {
    Vec x;  // point on the boundary
    Vec u;  // outer unit normal
    std::array<double, kMaxDim> k{};  // d-1 principal curvatures
    int curvature_count = 0;
};

// Normalized elementary symmetric functions H_0..H_{d-1} of the principal
// curvatures; H_0 = 1 and H_{d-1} is the Gauss curvature.
struct CurvatureEval {
    std::array<double, kMaxDim + 1> H{};
    int count = 0;  // d entries: H_0..H_{d-1}
};

inline CurvatureEval curvature_functions(std::span<const double> k) {
    const int m = static_cast<int>(k.size());  // = d-1
    CurvatureEval ev;
    ev.count = m + 1;
    std::array<double, kMaxDim + 1> e{};
    e[0] = 1.0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j >= 1; --j) e[static_cast<size_t>(j)] += k[static_cast<size_t>(i)] * e[static_cast<size_t>(j - 1)];
    for (int j = 0; j <= m; ++j) ev.H[static_cast<size_t>(j)] = e[static_cast<size_t>(j)] / binomial(m, j);
    return ev;
}

inline CurvatureEval curvature_functions(const BoundaryPoint& bp) {
    return curvature_functions(std::span<const double>(bp.k.data(), static_cast<size_t>(bp.curvature_count)));
}

// Gauss curvature H_{d-1} at a boundary point.
inline double gauss_curvature(const BoundaryPoint& bp) {
    double p = 1.0;
    for (int i = 0; i < bp.curvature_count; ++i) p *= bp.k[static_cast<size_t>(i)];
    return p;
}

// Orthonormal basis of u^perp via a Householder reflection.
inline Frame tangent_basis(const Vec& u) {
    const int d = u.dim();
    int m = 0;
    for (int i = 1; i < d; ++i)
        if (std::abs(u[i]) > std::abs(u[m])) m = i;
    const double s = u[m] >= 0 ? 1.0 : -1.0;
    Vec w = u;
    w[m] += s;
    w = normalized(w);
    Frame t;
    t.d = d;
    t.j = d - 1;
    int c = 0;
    for (int i = 0; i < d; ++i) {
        if (i == m) continue;
        Vec col = unit_axis(d, i) - (2.0 * w[i]) * w;
        t.cols[static_cast<size_t>(c++)] = col;
    }
    return t;
}

// Outer unit normal and principal curvatures at a boundary point. For the
// Capsule the result is piecewise (caps vs cylinder); Cube points must lie
// in the relative interior of a facet.
inline BoundaryPoint normal_and_curvatures(const Body& body, const Vec& x) {
    const int d = dim(body);
    if (x.dim() != d) throw dimension_error("normal_and_curvatures: dimension mismatch");
    const double bt = 1e-9 * std::max(1.0, circumradius(body));
    BoundaryPoint bp;
    bp.x = x;
    bp.curvature_count = d - 1;

    if (const auto* b = std::get_if<Ball>(&body)) {
        if (std::abs(norm(x) - b->radius) > bt)
            throw std::invalid_argument("normal_and_curvatures: point not on ball boundary");
        bp.u = normalized(x);
        for (int i = 0; i < d - 1; ++i) bp.k[static_cast<size_t>(i)] = 1.0 / b->radius;
        return bp;
    }
    if (const auto* e = std::get_if<Ellipsoid>(&body)) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            const double t = x[i] / e->semiaxes[static_cast<size_t>(i)];
            s += t * t;
        }
        if (std::abs(std::sqrt(s) - 1.0) * e->max_axis() > bt)
            throw std::invalid_argument("normal_and_curvatures: point not on ellipsoid boundary");
        Vec g(d);
        for (int i = 0; i < d; ++i) {
            const double a2 = e->semiaxes[static_cast<size_t>(i)] * e->semiaxes[static_cast<size_t>(i)];
            g[i] = 2.0 * x[i] / a2;
        }
        const double gn = norm(g);
        bp.u = (1.0 / gn) * g;
        // shape operator: tangent restriction of Hess(F)/|grad F|, F = sum x_i^2/a_i^2
        const Frame t = tangent_basis(bp.u);
        SymMat w;
        w.n = d - 1;
        for (int i = 0; i < d - 1; ++i)
            for (int k2 = i; k2 < d - 1; ++k2) {
                double acc = 0.0;
                for (int m = 0; m < d; ++m) {
                    const double a2 = e->semiaxes[static_cast<size_t>(m)] * e->semiaxes[static_cast<size_t>(m)];
                    acc += t.col(i)[m] * (2.0 / a2) * t.col(k2)[m];
                }
                w.at(i, k2) = w.at(k2, i) = acc / gn;
            }
        const auto ev = jacobi_eigenvalues(w);
        for (int i = 0; i < d - 1; ++i) bp.k[static_cast<size_t>(i)] = ev[static_cast<size_t>(i)];
        return bp;
    }
    if (const auto* c = std::get_if<Capsule>(&body)) {
        const double z = x[c->axis];
        const double half = 0.5 * c->core_length;
        if (std::abs(z) > half) {
            Vec center(d);
            center[c->axis] = z > 0 ? half : -half;
            const Vec rel = x - center;
            if (std::abs(norm(rel) - c->cap_radius) > bt)
                throw std::invalid_argument("normal_and_curvatures: point not on capsule boundary");
            bp.u = normalized(rel);
            for (int i = 0; i < d - 1; ++i) bp.k[static_cast<size_t>(i)] = 1.0 / c->cap_radius;
        } else {
            Vec perp = x;
            perp[c->axis] = 0.0;
            if (std::abs(norm(perp) - c->cap_radius) > bt)
                throw std::invalid_argument("normal_and_curvatures: point not on capsule boundary");
            bp.u = normalized(perp);
            bp.k[0] = 0.0;  // flat along the core axis
            for (int i = 1; i < d - 1; ++i) bp.k[static_cast<size_t>(i)] = 1.0 / c->cap_radius;
        }
        return bp;
    }
    const auto& q = std::get<Cube>(body);
    const double half = 0.5 * q.side;
    int facet = -1;
    for (int i = 0; i < d; ++i) {
        if (std::abs(x[i]) > half + bt)
            throw std::invalid_argument("normal_and_curvatures: point outside cube");
        if (std::abs(std::abs(x[i]) - half) <= bt) {
            if (facet >= 0)
                throw std::invalid_argument("normal_and_curvatures: cube edge/vertex point");
            facet = i;
        }
    }
    if (facet < 0) throw std::invalid_argument("normal_and_curvatures: point not on cube boundary");
    Vec u(d);
    u[facet] = x[facet] > 0 ? 1.0 : -1.0;
    bp.u = u;
    return bp;
}

// r such that a radius-r ball rolls freely inside K, when one exists.
inline std::optional<double> rolling_radius(const Body& body) {
    struct V {
        std::optional<double> operator()(const Ball& b) const { return b.radius; }
        std::optional<double> operator()(const Ellipsoid& e) const {
            return e.min_axis() * e.min_axis() / e.max_axis();
        }
        std::optional<double> operator()(const Capsule& c) const { return c.cap_radius; }
        std::optional<double> operator()(const Cube&) const { return std::nullopt; }
    };
    return std::visit(V{}, body);
}

// ---- boundary quadrature ----

struct QuadNode {
    BoundaryPoint bp;
    double weight;  // boundary-measure weight; weights sum to the total area
};

// Quadrature nodes covering the boundary (dimensions 2 and 3 only; higher
// dimensions use Monte Carlo fallbacks at the call sites).
inline std::vector<QuadNode> boundary_quadrature(const Body& body, int level = 1) {
    const int d = dim(body);
    if (d > 3) throw unsupported_error("boundary_quadrature: only d in {2,3}");
    std::vector<QuadNode> nodes;

    auto push = [&](const Vec& x, double w) {
        nodes.push_back({normal_and_curvatures(body, x), w});
    };

    if (d == 2) {
        const int n = 1024 * level;
        if (const auto* b = std::get_if<Ball>(&body)) {
            const double h = 2.0 * kPi / n;
            for (int i = 0; i < n; ++i) {
                const double th = (i + 0.5) * h;
                push({b->radius * std::cos(th), b->radius * std::sin(th)}, b->radius * h);
            }
        } else if (const auto* e = std::get_if<Ellipsoid>(&body)) {
            const double a = e->semiaxes[0], b2 = e->semiaxes[1];
            const double h = 2.0 * kPi / n;
            for (int i = 0; i < n; ++i) {
                const double th = (i + 0.5) * h;
                const double speed = std::hypot(a * std::sin(th), b2 * std::cos(th));
                push({a * std::cos(th), b2 * std::sin(th)}, speed * h);
            }
        } else if (const auto* c = std::get_if<Capsule>(&body)) {
            const double r = c->cap_radius, half = 0.5 * c->core_length;
            const int ncap = n / 4, nside = n / 4;
            // two semicircular caps
            for (int side = 0; side < 2; ++side) {
                const double sgn = side == 0 ? 1.0 : -1.0;
                const double h = kPi / ncap;
                for (int i = 0; i < ncap; ++i) {
                    const double th = -0.5 * kPi + (i + 0.5) * h;  // angle from the axis direction
                    Vec x(2);
                    x[c->axis] = sgn * (half + r * std::cos(th));
                    x[1 - c->axis] = r * std::sin(th);
                    push(x, r * h);
                }
            }
            // two straight sides
            if (c->core_length > 0) {
                const double h = c->core_length / nside;
                for (int side = 0; side < 2; ++side) {
                    const double sgn = side == 0 ? 1.0 : -1.0;
                    for (int i = 0; i < nside; ++i) {
                        Vec x(2);
                        x[c->axis] = -half + (i + 0.5) * h;
                        x[1 - c->axis] = sgn * r;
                        push(x, h);
                    }
                }
            }
        } else {
            const auto& q = std::get<Cube>(body);
            const double half = 0.5 * q.side;
            const int m = n / 4;
            const double h = q.side / m;
            for (int axis = 0; axis < 2; ++axis)
                for (int side = 0; side < 2; ++side)
                    for (int i = 0; i < m; ++i) {
                        Vec x(2);
                        x[axis] = side == 0 ? half : -half;
                        x[1 - axis] = -half + (i + 0.5) * h;
                        push(x, h);
                    }
        }
        return nodes;
    }

    // d == 3
    const int nz = 48 * level, nphi = 96 * level;
    auto sphere_grid = [&](auto&& f) {
        const auto gl = gauss_legendre(nz, -1.0, 1.0);
        const double hphi = 2.0 * kPi / nphi;
        for (const auto& p : gl)
            for (int i = 0; i < nphi; ++i) {
                const double phi = (i + 0.5) * hphi;
                const double rho = std::sqrt(std::max(0.0, 1.0 - p.x * p.x));
                Vec u{rho * std::cos(phi), rho * std::sin(phi), p.x};
                f(u, p.w * hphi);  // weight on the unit sphere
            }
    };

    if (const auto* b = std::get_if<Ball>(&body)) {
        sphere_grid([&](const Vec& u, double w) { push(b->radius * u, b->radius * b->radius * w); });
    } else if (const auto* e = std::get_if<Ellipsoid>(&body)) {
        sphere_grid([&](const Vec& u, double w) {
            Vec x(3), n(3);
            double prod = 1.0;
            for (int i = 0; i < 3; ++i) {
                x[i] = e->semiaxes[static_cast<size_t>(i)] * u[i];
                n[i] = u[i] / e->semiaxes[static_cast<size_t>(i)];
                prod *= e->semiaxes[static_cast<size_t>(i)];
            }
            push(x, prod * norm(n) * w);
        });
    } else if (const auto* c = std::get_if<Capsule>(&body)) {
        const double r = c->cap_radius, half = 0.5 * c->core_length;
        sphere_grid([&](const Vec& u, double w) {
            // whole sphere split into the two caps by the sign of the axis coordinate
            Vec x = r * u;
            x[c->axis] += u[c->axis] >= 0 ? half : -half;
            push(x, r * r * w);
        });
        if (c->core_length > 0) {
            const int na = 32 * level, nc = 64 * level;
            const double ha = c->core_length / na, hc = 2.0 * kPi / nc;
            const int a0 = c->axis, a1 = (c->axis + 1) % 3, a2 = (c->axis + 2) % 3;
            for (int i = 0; i < na; ++i)
                for (int k2 = 0; k2 < nc; ++k2) {
                    const double phi = (k2 + 0.5) * hc;
                    Vec x(3);
                    x[a0] = -half + (i + 0.5) * ha;
                    x[a1] = r * std::cos(phi);
                    x[a2] = r * std::sin(phi);
                    push(x, r * ha * hc);
                }
        }
    } else {
        const auto& q = std::get<Cube>(body);
        const double half = 0.5 * q.side;
        const int m = 32 * level;
        const double h = q.side / m;
        for (int axis = 0; axis < 3; ++axis)
            for (int side = 0; side < 2; ++side)
                for (int i = 0; i < m; ++i)
                    for (int k2 = 0; k2 < m; ++k2) {
                        Vec x(3);
                        x[axis] = side == 0 ? half : -half;
                        x[(axis + 1) % 3] = -half + (i + 0.5) * h;
                        x[(axis + 2) % 3] = -half + (k2 + 0.5) * h;
                        push(x, h * h);
                    }
    }
    return nodes;
}

// Total boundary measure H^{d-1}(dK). Analytic except for ellipsoids,
// where a quadrature value is returned (d <= 3).
inline double boundary_area(const Body& body) {
    const int d = dim(body);
    if (const auto* b = std::get_if<Ball>(&body))
        return unit_sphere_area(d) * std::pow(b->radius, d - 1);
    if (const auto* c = std::get_if<Capsule>(&body))
        return unit_sphere_area(d) * std::pow(c->cap_radius, d - 1) +
               c->core_length * (d - 1) * alpha(d - 1) * std::pow(c->cap_radius, d - 2);
    if (const auto* q = std::get_if<Cube>(&body))
        return 2.0 * d * std::pow(q->side, d - 1);
    // ellipsoid
    if (d > 3) throw unsupported_error("boundary_area: ellipsoid area needs d <= 3");
    double s = 0.0;
    for (const auto& node : boundary_quadrature(body, 2)) s += node.weight;
    return s;
}

struct AnalyticVolume {
    double value;
    bool numeric;  // true when the value comes from quadrature rather than a closed form
};

// Exact intrinsic volume V_j(K) where a formula (or controlled quadrature)
// exists; std::nullopt signals callers to fall back to the Kubota estimator.
inline std::optional<AnalyticVolume> intrinsic_volume_analytic(const Body& body, int j) {
    const int d = dim(body);
    if (j < 0 || j > d) throw std::invalid_argument("intrinsic_volume_analytic: j out of range");
    if (j == 0) return AnalyticVolume{1.0, false};

    if (const auto* b = std::get_if<Ball>(&body))
        return AnalyticVolume{binomial(d, j) * alpha(d) / alpha(d - j) * std::pow(b->radius, j), false};

    if (const auto* q = std::get_if<Cube>(&body))
        return AnalyticVolume{binomial(d, j) * std::pow(q->side, j), false};

    if (const auto* c = std::get_if<Capsule>(&body)) {
        // parallel body of a segment: only V_0 and V_1 of the core survive
        const double r = c->cap_radius, len = c->core_length;
        const double v = binomial(d, d - j) * (alpha(d) / alpha(d - j)) * std::pow(r, j) +
                         binomial(d - 1, d - j) * (alpha(d - 1) / alpha(d - j)) * std::pow(r, j - 1) * len;
        return AnalyticVolume{v, false};
    }

    const auto& e = std::get<Ellipsoid>(body);
    if (j == d) {
        double prod = 1.0;
        for (int i = 0; i < d; ++i) prod *= e.semiaxes[static_cast<size_t>(i)];
        return AnalyticVolume{alpha(d) * prod, false};
    }
    if (d > 3) return std::nullopt;
    if (j == d - 1) return AnalyticVolume{0.5 * boundary_area(body), true};
    if (j == 1 && d == 3) {
        // V_1 = (1/alpha_{d-1}) * integral of the support function over S^{d-1}
        const int nz = 96, nphi = 192;
        const auto gl = gauss_legendre(nz, -1.0, 1.0);
        const double hphi = 2.0 * kPi / nphi;
        double s = 0.0;
        for (const auto& p : gl)
            for (int i = 0; i < nphi; ++i) {
                const double phi = (i + 0.5) * hphi;
                const double rho = std::sqrt(std::max(0.0, 1.0 - p.x * p.x));
                Vec u{rho * std::cos(phi), rho * std::sin(phi), p.x};
                s += support(body, u) * p.w * hphi;
            }
        return AnalyticVolume{s / alpha(d - 1), true};
    }
    return std::nullopt;
}

// ---- shadow membership ----

// Membership oracle for the orthogonal shadow K|L, built once per frame so
// repeated queries are cheap. Cube shadows are zonotopes; their membership
// reuses the hull machinery on the 2^d projected sign vertices.
class ShadowOracle {
public:
    ShadowOracle(const Body& body, const Frame& L) : j_(L.j) {
        if (dim(body) != L.d) throw dimension_error("ShadowOracle: dimension mismatch");
        lo_ = Vec(L.j);
        hi_ = Vec(L.j);
        for (int i = 0; i < L.j; ++i) {
            hi_[i] = support(body, L.col(i));
            lo_[i] = -support(body, -1.0 * L.col(i));
        }
        if (j_ == 1) {
            mode_ = Mode::interval;
            return;
        }
        if (const auto* b = std::get_if<Ball>(&body)) {
            mode_ = Mode::ball;
            radius_ = b->radius;
            return;
        }
        if (const auto* e = std::get_if<Ellipsoid>(&body)) {
            mode_ = Mode::ellipsoid;
            build_ellipsoid(*e, L);
            return;
        }
        if (const auto* c = std::get_if<Capsule>(&body)) {
            mode_ = Mode::capsule;
            radius_ = c->cap_radius;
            auto [a, b2] = capsule_segment(*c);
            seg_a_ = project(a, L);
            seg_b_ = project(b2, L);
            return;
        }
        build_cube(std::get<Cube>(body), L);
    }

    bool contains(const Vec& y, double tol = 1e-9) const {
        if (y.dim() != j_) throw dimension_error("ShadowOracle: query dimension mismatch");
        switch (mode_) {
            case Mode::interval:
                return y[0] >= lo_[0] - tol && y[0] <= hi_[0] + tol;
            case Mode::ball:
                return norm(y) <= radius_ + tol;
            case Mode::ellipsoid: {
                double s = 0.0;
                for (int i = 0; i < j_; ++i)
                    for (int k2 = 0; k2 < j_; ++k2) s += y[i] * shadow_inv_.at(i, k2) * y[k2];
                return std::sqrt(std::max(0.0, s)) <= 1.0 + tol / min_shadow_axis_;
            }
            case Mode::capsule:
                return dist_point_segment(y, seg_a_, seg_b_) <= radius_ + tol;
            case Mode::planes: {
                for (const auto& [n, off] : planes_)
                    if (dot(n, y) > off + tol) return false;
                return true;
            }
            case Mode::vertex_hull:
                return in_hull(vertices_, y, std::max(tol, 1e-9)).inside;
        }
        return false;
    }

    // axis-aligned bounding box of the shadow in frame coordinates
    const Vec& box_lo() const { return lo_; }
    const Vec& box_hi() const { return hi_; }
    double box_volume() const {
        double v = 1.0;
        for (int i = 0; i < j_; ++i) v *= hi_[i] - lo_[i];
        return v;
    }

private:
    enum class Mode { interval, ball, ellipsoid, capsule, planes, vertex_hull };

    void build_ellipsoid(const Ellipsoid& e, const Frame& L) {
        // shadow = {y : y^T (B^T A^2 B)^{-1} y <= 1}, A = diag(semiaxes)
        const int j = L.j;
        std::array<double, kMaxSolve * kMaxSolve> g{};
        for (int i = 0; i < j; ++i)
            for (int k2 = 0; k2 < j; ++k2) {
                double s = 0.0;
                for (int m = 0; m < L.d; ++m) {
                    const double a2 = e.semiaxes[static_cast<size_t>(m)] * e.semiaxes[static_cast<size_t>(m)];
                    s += L.col(i)[m] * a2 * L.col(k2)[m];
                }
                g[static_cast<size_t>(i * kMaxSolve + k2)] = s;
            }
        shadow_inv_.n = j;
        for (int col = 0; col < j; ++col) {
            auto a = g;
            std::array<double, kMaxSolve> rhs{};
            rhs[static_cast<size_t>(col)] = 1.0;
            if (!solve_linear(j, a, rhs))
                throw numeric_error("ShadowOracle: singular shadow matrix");
            for (int row = 0; row < j; ++row) shadow_inv_.at(row, col) = rhs[static_cast<size_t>(row)];
        }
        SymMat m = shadow_inv_;
        const auto ev = jacobi_eigenvalues(m);
        min_shadow_axis_ = 1.0 / std::sqrt(ev[static_cast<size_t>(j - 1)]);
    }

    void build_cube(const Cube& q, const Frame& L) {
        const int d = L.d, j = L.j;
        std::vector<Vec> gens(static_cast<size_t>(d), Vec(j));
        for (int i = 0; i < d; ++i)
            for (int c = 0; c < j; ++c) gens[static_cast<size_t>(i)][c] = 0.5 * q.side * L.col(c)[i];
        vertices_.clear();
        vertices_.reserve(static_cast<size_t>(1) << d);
        for (int mask = 0; mask < (1 << d); ++mask) {
            Vec v(j);
            for (int i = 0; i < d; ++i) v += (mask >> i & 1 ? 1.0 : -1.0) * gens[static_cast<size_t>(i)];
            vertices_.push_back(v);
        }
        if (j == 2) {
            build_polygon_planes();
            return;
        }
        if (j == 3) {
            Hull3D h(vertices_);
            if (!h.degenerate()) {
                planes_ = h.facet_planes();
                mode_ = Mode::planes;
                return;
            }
        }
        mode_ = Mode::vertex_hull;
    }

    void build_polygon_planes() {
        std::vector<std::pair<double, double>> p;
        p.reserve(vertices_.size());
        for (const Vec& v : vertices_) p.emplace_back(v[0], v[1]);
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
        auto cross = [](auto& o, auto& a, auto& b) {
            return (a.first - o.first) * (b.second - o.second) -
                   (a.second - o.second) * (b.first - o.first);
        };
        std::vector<std::pair<double, double>> h(2 * p.size());
        size_t k = 0;
        for (size_t i = 0; i < p.size(); ++i) {
            while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
            h[k++] = p[i];
        }
        for (size_t i = p.size() - 1, lo = k + 1; i-- > 0;) {
            while (k >= lo && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
            h[k++] = p[i];
        }
        h.resize(k - 1);
        planes_.clear();
        for (size_t i = 0; i < h.size(); ++i) {
            const auto& a = h[i];
            const auto& b = h[(i + 1) % h.size()];
            Vec n{b.second - a.second, -(b.first - a.first)};  // outward for ccw order
            const double nn = norm(n);
            if (nn == 0.0) continue;
            n *= 1.0 / nn;
            planes_.emplace_back(n, n[0] * a.first + n[1] * a.second);
        }
        mode_ = Mode::planes;
    }

    Mode mode_ = Mode::vertex_hull;
    int j_;
    Vec lo_, hi_;
    double radius_ = 0.0;
    SymMat shadow_inv_;
    double min_shadow_axis_ = 1.0;
    Vec seg_a_, seg_b_;
    std::vector<std::pair<Vec, double>> planes_;
    std::vector<Vec> vertices_;
};

// One-shot convenience; build a ShadowOracle directly for repeated queries.
inline bool projected_contains(const Body& body, const Frame& L, const Vec& y, double tol = 1e-9) {
    return ShadowOracle(body, L).contains(y, tol);
}

}  // namespace randpoly
