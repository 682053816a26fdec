#pragma once

// Geometry of point-cloud hulls: membership tests in arbitrary small
// dimension, exact hull area/volume in dimensions 2 and 3, support values.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "randpoly/linalg.hpp"

namespace randpoly {

struct MembershipResult {
    bool inside = false;
    double distance = 0.0;  // distance from the query to the hull
    // inside: convex coefficients over the active points, sum to 1
    std::vector<std::pair<int, double>> coefficients;
    // outside: <a, q> - max_i <a, x_i> = margin > 0
    Vec separating_direction;
    double margin = 0.0;
};

// Decides q in conv(points) by the min-norm-point method (Wolfe): minimize
// ||p - q|| over the hull through affine minimizations on an affinely
// independent active set. Returns a witness either way.
inline MembershipResult in_hull(std::span<const Vec> points, const Vec& q, double tol = 1e-9) {
    if (points.empty()) throw std::invalid_argument("in_hull: empty point set");
    const int dim = q.dim();
    const int n = static_cast<int>(points.size());

    double scale = 1e-30;
    std::vector<Vec> z(points.size());
    for (int i = 0; i < n; ++i) {
        z[static_cast<size_t>(i)] = points[static_cast<size_t>(i)] - q;
        scale = std::max(scale, norm(z[static_cast<size_t>(i)]));
    }

    int best = 0;
    for (int i = 1; i < n; ++i)
        if (norm2(z[static_cast<size_t>(i)]) < norm2(z[static_cast<size_t>(best)])) best = i;

    std::vector<int> active{best};
    std::vector<double> lambda{1.0};
    Vec p = z[static_cast<size_t>(best)];

    auto finish_inside = [&]() {
        MembershipResult r;
        r.inside = true;
        r.distance = norm(p);
        for (size_t i = 0; i < active.size(); ++i)
            if (lambda[i] > 0.0) r.coefficients.emplace_back(active[i], lambda[i]);
        return r;
    };
    auto finish_outside = [&]() {
        MembershipResult r;
        r.inside = false;
        r.distance = norm(p);
        r.separating_direction = (-1.0 / norm(p)) * p;
        double worst = -1e300;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, dot(r.separating_direction, points[static_cast<size_t>(i)]));
        r.margin = dot(r.separating_direction, q) - worst;
        return r;
    };

    // affine minimizer of ||Z mu|| over the active set, weights summing to 1
    auto affine_min = [&](std::vector<double>& mu) -> bool {
        const int s = static_cast<int>(active.size());
        std::array<double, kMaxSolve * kMaxSolve> A{};
        std::array<double, kMaxSolve> b{};
        for (int i = 0; i < s; ++i) {
            for (int k = 0; k < s; ++k)
                A[static_cast<size_t>(i * kMaxSolve + k)] =
                    dot(z[static_cast<size_t>(active[static_cast<size_t>(i)])],
                        z[static_cast<size_t>(active[static_cast<size_t>(k)])]);
            A[static_cast<size_t>(i * kMaxSolve + s)] = 1.0;
            A[static_cast<size_t>(s * kMaxSolve + i)] = 1.0;
        }
        b[static_cast<size_t>(s)] = 1.0;
        if (!solve_linear(s + 1, A, b)) return false;
        mu.assign(b.begin(), b.begin() + s);
        return true;
    };

    constexpr int kMaxIter = 10000;
    double best_norm2 = norm2(p);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        const double pn2 = norm2(p);
        if (pn2 <= tol * tol) return finish_inside();

        int m = 0;
        double mval = 1e300;
        for (int i = 0; i < n; ++i) {
            const double v = dot(p, z[static_cast<size_t>(i)]);
            if (v < mval) {
                mval = v;
                m = i;
            }
        }
        // duality gap: no vertex improves on p, so p is the min-norm point
        if (mval >= pn2 - 1e-12 * scale * std::sqrt(pn2)) return finish_outside();

        if (std::find(active.begin(), active.end(), m) == active.end()) {
            active.push_back(m);
            lambda.push_back(0.0);
        }

        bool stalled = false;
        for (int minor = 0; minor <= dim + 2 && !stalled; ++minor) {
            std::vector<double> mu;
            while (!affine_min(mu)) {
                // affinely dependent set: drop the weakest member and retry
                int drop = -1;
                double lmin = 1e300;
                for (size_t i = 0; i < active.size(); ++i)
                    if (active[i] != m && lambda[i] < lmin) {
                        lmin = lambda[i];
                        drop = static_cast<int>(i);
                    }
                if (drop < 0) throw numeric_error("in_hull: degenerate active set");
                active.erase(active.begin() + drop);
                lambda.erase(lambda.begin() + drop);
            }
            double mmin = 1e300;
            for (double v : mu) mmin = std::min(mmin, v);
            if (mmin >= -1e-12) {
                lambda = mu;
                for (double& l : lambda) l = std::max(l, 0.0);
                break;
            }
            // step toward mu until a coefficient hits zero, then drop it
            double theta = 1.0;
            for (size_t i = 0; i < mu.size(); ++i)
                if (mu[i] <= 0.0 && lambda[i] - mu[i] > 0.0)
                    theta = std::min(theta, lambda[i] / (lambda[i] - mu[i]));
            if (theta <= 0.0) {
                // roundoff corner: the fresh vertex got a nonpositive weight;
                // no numerical progress is possible from here
                stalled = true;
                break;
            }
            for (size_t i = 0; i < mu.size(); ++i)
                lambda[i] = (1.0 - theta) * lambda[i] + theta * mu[i];
            for (int i = static_cast<int>(active.size()) - 1; i >= 0; --i)
                if (lambda[static_cast<size_t>(i)] <= 1e-16) {
                    active.erase(active.begin() + i);
                    lambda.erase(lambda.begin() + i);
                }
            if (active.empty()) throw numeric_error("in_hull: empty active set");
        }

        p = Vec(dim);
        for (size_t i = 0; i < active.size(); ++i) p += lambda[i] * z[static_cast<size_t>(active[i])];

        // anti-cycling: every major iteration must make measurable progress
        if (stalled || norm2(p) > best_norm2 - 1e-30 * scale * scale) {
            if (norm2(p) <= tol * tol) return finish_inside();
            return finish_outside();
        }
        best_norm2 = norm2(p);
    }
    throw numeric_error("in_hull: iteration cap exceeded, residual " + std::to_string(norm(p)));
}

inline double cloud_support(std::span<const Vec> points, const Vec& u) {
    if (points.empty()) throw std::invalid_argument("cloud_support: empty cloud");
    if (norm2(u) == 0.0) throw std::invalid_argument("cloud_support: zero direction");
    double h = -1e300;
    for (const Vec& x : points) h = std::max(h, dot(x, u));
    return h;
}

// Area of conv(points) in the plane: monotone chain + shoelace.
// Degenerate inputs give 0.
inline double hull_measure_2d(std::span<const Vec> points) {
    const size_t n = points.size();
    if (n < 3) return 0.0;
    std::vector<std::pair<double, double>> p(n);
    for (size_t i = 0; i < n; ++i) p[i] = {points[i][0], points[i][1]};
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) return 0.0;

    auto cross = [](const std::pair<double, double>& o, const std::pair<double, double>& a,
                    const std::pair<double, double>& b) {
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
    double a2 = 0.0;
    for (size_t i = 0; i < h.size(); ++i) {
        const auto& s = h[i];
        const auto& t = h[(i + 1) % h.size()];
        a2 += s.first * t.second - t.first * s.second;
    }
    return 0.5 * std::abs(a2);
}

namespace detail {
inline Vec cross3(const Vec& a, const Vec& b) {
    Vec c(3);
    c[0] = a[1] * b[2] - a[2] * b[1];
    c[1] = a[2] * b[0] - a[0] * b[2];
    c[2] = a[0] * b[1] - a[1] * b[0];
    return c;
}
}  // namespace detail

// Incremental (quickhull-style) convex hull in R^3 with per-facet outside
// sets. Points are expected in general position up to the eps guard; flat
// inputs are reported as degenerate.
class Hull3D {
public:
    explicit Hull3D(std::span<const Vec> points) : pts_(points.begin(), points.end()) {
        if (pts_.size() < 4) {
            degenerate_ = true;
            return;
        }
        for (const Vec& p : pts_)
            for (int i = 0; i < 3; ++i) scale_ = std::max(scale_, std::abs(p[i]));
        eps_ = 1e-10 * scale_;
        build();
    }

    bool degenerate() const { return degenerate_; }

    double volume() const {
        if (degenerate_) return 0.0;
        double v = 0.0;
        for (const Facet& f : facets_) {
            if (f.dead) continue;
            const Vec& a = pts_[static_cast<size_t>(f.v[0])];
            const Vec& b = pts_[static_cast<size_t>(f.v[1])];
            const Vec& c = pts_[static_cast<size_t>(f.v[2])];
            v += dot(a - interior_, detail::cross3(b - interior_, c - interior_));
        }
        return v / 6.0;
    }

    double surface_area() const {
        if (degenerate_) return 0.0;
        double s = 0.0;
        for (const Facet& f : facets_) {
            if (f.dead) continue;
            const Vec& a = pts_[static_cast<size_t>(f.v[0])];
            s += 0.5 * norm(detail::cross3(pts_[static_cast<size_t>(f.v[1])] - a,
                                           pts_[static_cast<size_t>(f.v[2])] - a));
        }
        return s;
    }

    int facet_count() const {
        int c = 0;
        for (const Facet& f : facets_)
            if (!f.dead) ++c;
        return c;
    }

    int vertex_count() const {
        std::vector<int> used;
        for (const Facet& f : facets_)
            if (!f.dead) used.insert(used.end(), {f.v[0], f.v[1], f.v[2]});
        std::sort(used.begin(), used.end());
        used.erase(std::unique(used.begin(), used.end()), used.end());
        return static_cast<int>(used.size());
    }

    int edge_count() const { return 3 * facet_count() / 2; }

    bool euler_ok() const {
        return degenerate_ || vertex_count() - edge_count() + facet_count() == 2;
    }

    // facet planes as (unit normal, offset), outward oriented
    std::vector<std::pair<Vec, double>> facet_planes() const {
        std::vector<std::pair<Vec, double>> out;
        for (const Facet& f : facets_) {
            if (f.dead) continue;
            const double nn = norm(f.normal);
            out.emplace_back((1.0 / nn) * f.normal, f.offset / nn);
        }
        return out;
    }

private:
    struct Facet {
        int v[3];
        Vec normal;     // outward, not normalized
        double offset;  // <normal, x> = offset on the plane
        int neighbor[3];
        std::vector<int> outside;
        bool dead = false;
    };

    void make_facet_geometry(Facet& f) {
        const Vec& a = pts_[static_cast<size_t>(f.v[0])];
        f.normal = detail::cross3(pts_[static_cast<size_t>(f.v[1])] - a,
                                  pts_[static_cast<size_t>(f.v[2])] - a);
        f.offset = dot(f.normal, a);
        if (dot(f.normal, interior_) > f.offset) {
            std::swap(f.v[1], f.v[2]);
            f.normal = -1.0 * f.normal;
            f.offset = -f.offset;
        }
    }

    double height(const Facet& f, int p) const {
        return (dot(f.normal, pts_[static_cast<size_t>(p)]) - f.offset) / norm(f.normal);
    }

    void build() {
        const int n = static_cast<int>(pts_.size());
        // initial simplex from extreme points
        int i0 = 0, i1 = 0;
        for (int i = 1; i < n; ++i) {
            if (pts_[static_cast<size_t>(i)][0] < pts_[static_cast<size_t>(i0)][0]) i0 = i;
            if (pts_[static_cast<size_t>(i)][0] > pts_[static_cast<size_t>(i1)][0]) i1 = i;
        }
        if (i0 == i1) i1 = (i0 + 1) % n;
        const Vec dir = pts_[static_cast<size_t>(i1)] - pts_[static_cast<size_t>(i0)];
        int i2 = -1;
        double best = eps_;
        for (int i = 0; i < n; ++i) {
            const Vec w = pts_[static_cast<size_t>(i)] - pts_[static_cast<size_t>(i0)];
            const double h = norm(detail::cross3(dir, w));
            if (h > best) {
                best = h;
                i2 = i;
            }
        }
        if (i2 < 0) {
            degenerate_ = true;
            return;
        }
        const Vec nrm = detail::cross3(dir, pts_[static_cast<size_t>(i2)] - pts_[static_cast<size_t>(i0)]);
        int i3 = -1;
        best = eps_ * norm(nrm);
        for (int i = 0; i < n; ++i) {
            const double h = std::abs(dot(nrm, pts_[static_cast<size_t>(i)] - pts_[static_cast<size_t>(i0)]));
            if (h > best) {
                best = h;
                i3 = i;
            }
        }
        if (i3 < 0) {
            degenerate_ = true;
            return;
        }

        interior_ = 0.25 * (pts_[static_cast<size_t>(i0)] + pts_[static_cast<size_t>(i1)] +
                            pts_[static_cast<size_t>(i2)] + pts_[static_cast<size_t>(i3)]);

        const int tet[4][3] = {{i0, i1, i2}, {i0, i1, i3}, {i0, i2, i3}, {i1, i2, i3}};
        for (auto& t : tet) {
            Facet f;
            f.v[0] = t[0];
            f.v[1] = t[1];
            f.v[2] = t[2];
            make_facet_geometry(f);
            facets_.push_back(std::move(f));
        }
        link_all_neighbors();

        std::vector<int> work;
        for (int i = 0; i < n; ++i) {
            if (i == i0 || i == i1 || i == i2 || i == i3) continue;
            assign_point(i, work);
        }

        std::vector<int> stack;
        for (int fi = 0; fi < static_cast<int>(facets_.size()); ++fi)
            if (!facets_[static_cast<size_t>(fi)].outside.empty()) stack.push_back(fi);

        while (!stack.empty()) {
            const int fi = stack.back();
            stack.pop_back();
            Facet& f = facets_[static_cast<size_t>(fi)];
            if (f.dead || f.outside.empty()) continue;

            int apex = f.outside[0];
            double hbest = height(f, apex);
            for (int p : f.outside) {
                const double h = height(f, p);
                if (h > hbest) {
                    hbest = h;
                    apex = p;
                }
            }
            insert_point(fi, apex, stack);
        }
    }

    void link_all_neighbors() {
        // brute-force edge matching; only used for the 4-facet seed
        for (size_t a = 0; a < facets_.size(); ++a)
            for (int e = 0; e < 3; ++e) {
                const int u = facets_[a].v[e];
                const int v = facets_[a].v[(e + 1) % 3];
                for (size_t b2 = 0; b2 < facets_.size(); ++b2) {
                    if (a == b2) continue;
                    for (int e2 = 0; e2 < 3; ++e2) {
                        if (facets_[b2].v[e2] == v && facets_[b2].v[(e2 + 1) % 3] == u)
                            facets_[a].neighbor[e] = static_cast<int>(b2);
                    }
                }
            }
    }

    void assign_point(int p, std::vector<int>&) {
        for (size_t fi = 0; fi < facets_.size(); ++fi) {
            Facet& f = facets_[fi];
            if (f.dead) continue;
            if (dot(f.normal, pts_[static_cast<size_t>(p)]) - f.offset > eps_ * norm(f.normal)) {
                f.outside.push_back(p);
                return;
            }
        }
        // interior point: dropped
    }

    void insert_point(int seed_facet, int apex, std::vector<int>& stack) {
        const Vec& p = pts_[static_cast<size_t>(apex)];
        // BFS over facets visible from the apex
        std::vector<int> visible{seed_facet};
        std::vector<char> mark(facets_.size(), 0);
        mark[static_cast<size_t>(seed_facet)] = 1;
        std::vector<std::pair<int, int>> horizon;  // (facet index, edge index) on visible side
        for (size_t qi = 0; qi < visible.size(); ++qi) {
            const int fi = visible[qi];
            const Facet f = facets_[static_cast<size_t>(fi)];
            for (int e = 0; e < 3; ++e) {
                const int nb = f.neighbor[e];
                if (mark[static_cast<size_t>(nb)]) continue;
                const Facet& g = facets_[static_cast<size_t>(nb)];
                if (dot(g.normal, p) - g.offset > eps_ * norm(g.normal)) {
                    mark[static_cast<size_t>(nb)] = 1;
                    visible.push_back(nb);
                } else {
                    horizon.emplace_back(fi, e);
                }
            }
        }
        if (horizon.empty()) throw numeric_error("Hull3D: empty horizon (degenerate facet)");

        // order the horizon into a closed loop of directed edges
        std::vector<std::array<int, 3>> loop;  // (u, v, hidden neighbor)
        for (auto [fi, e] : horizon) {
            const Facet& f = facets_[static_cast<size_t>(fi)];
            loop.push_back({f.v[e], f.v[(e + 1) % 3], f.neighbor[e]});
        }
        for (size_t i = 0; i + 1 < loop.size(); ++i) {
            bool found = false;
            for (size_t k2 = i + 1; k2 < loop.size(); ++k2)
                if (loop[k2][0] == loop[i][1]) {
                    std::swap(loop[i + 1], loop[k2]);
                    found = true;
                    break;
                }
            if (!found) throw numeric_error("Hull3D: horizon failed to close");
        }
        if (loop.back()[1] != loop.front()[0]) throw numeric_error("Hull3D: horizon not a loop");

        std::vector<int> collected;
        for (int fi : visible) {
            Facet& f = facets_[static_cast<size_t>(fi)];
            collected.insert(collected.end(), f.outside.begin(), f.outside.end());
            f.outside.clear();
            f.dead = true;
        }

        const int base = static_cast<int>(facets_.size());
        const int m = static_cast<int>(loop.size());
        for (int i = 0; i < m; ++i) {
            Facet f;
            f.v[0] = loop[static_cast<size_t>(i)][0];
            f.v[1] = loop[static_cast<size_t>(i)][1];
            f.v[2] = apex;
            make_facet_geometry(f);
            if (norm(f.normal) < eps_ * scale_)
                throw numeric_error("Hull3D: near-degenerate facet");
            // neighbors: hidden facet across the horizon edge, cone facets around
            f.neighbor[0] = loop[static_cast<size_t>(i)][2];
            f.neighbor[1] = base + (i + 1) % m;
            f.neighbor[2] = base + (i + m - 1) % m;
            facets_.push_back(std::move(f));
        }
        // repair hidden facets' links toward the new cone
        for (int i = 0; i < m; ++i) {
            Facet& hidden = facets_[static_cast<size_t>(loop[static_cast<size_t>(i)][2])];
            for (int e = 0; e < 3; ++e)
                if (hidden.v[e] == loop[static_cast<size_t>(i)][1] &&
                    hidden.v[(e + 1) % 3] == loop[static_cast<size_t>(i)][0])
                    hidden.neighbor[e] = base + i;
        }
        mark.resize(facets_.size(), 0);

        for (int pt : collected) {
            if (pt == apex) continue;
            bool placed = false;
            for (int i = 0; i < m && !placed; ++i) {
                Facet& f = facets_[static_cast<size_t>(base + i)];
                if (dot(f.normal, pts_[static_cast<size_t>(pt)]) - f.offset > eps_ * norm(f.normal)) {
                    f.outside.push_back(pt);
                    placed = true;
                }
            }
        }
        for (int i = 0; i < m; ++i)
            if (!facets_[static_cast<size_t>(base + i)].outside.empty()) stack.push_back(base + i);
    }

    std::vector<Vec> pts_;
    std::vector<Facet> facets_;
    Vec interior_ = Vec(3);
    double scale_ = 1e-30;
    double eps_ = 0.0;
    bool degenerate_ = false;
};

// (volume, surface area) of conv(points) in R^3.
inline std::pair<double, double> hull_measure_3d(std::span<const Vec> points) {
    if (points.size() < 4) throw std::invalid_argument("hull_measure_3d: need >= 4 points");
    Hull3D h(points);
    if (h.degenerate()) return {0.0, 0.0};
    return {h.volume(), h.surface_area()};
}

}  // namespace randpoly
