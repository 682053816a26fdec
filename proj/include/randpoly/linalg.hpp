#pragma once

// Dense small-dimension vector/matrix algebra for ambient dimensions 2..10.
// Everything is stack-allocated; no heap traffic in the inner loops.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "randpoly/rng.hpp"

namespace randpoly {

inline constexpr int kMaxDim = 10;

struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed-capacity vector with runtime dimension.
class Vec {
public:
    Vec() = default;
    explicit Vec(int dim) : dim_(check_dim(dim)) { coords_.fill(0.0); }
    Vec(std::initializer_list<double> xs) : dim_(check_dim(static_cast<int>(xs.size()))) {
        coords_.fill(0.0);
        std::copy(xs.begin(), xs.end(), coords_.begin());
    }

    int dim() const { return dim_; }
    double& operator[](int i) { return coords_[static_cast<size_t>(i)]; }
    double operator[](int i) const { return coords_[static_cast<size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < dim_; ++i) coords_[i] += o.coords_[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < dim_; ++i) coords_[i] -= o.coords_[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < dim_; ++i) coords_[i] *= s;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator*(Vec a, double s) { return a *= s; }

private:
    static int check_dim(int d) {
        if (d < 0 || d > kMaxDim) throw dimension_error("Vec: dimension out of range");
        return d;
    }
    std::array<double, kMaxDim> coords_{};
    int dim_ = 0;
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline Vec normalized(const Vec& a) {
    const double n = norm(a);
    if (n == 0.0) throw numeric_error("normalized: zero vector");
    return (1.0 / n) * a;
}

inline Vec unit_axis(int dim, int axis) {
    Vec e(dim);
    e[axis] = 1.0;
    return e;
}

// Orthonormal column frame spanning a j-dimensional subspace of R^d.
struct Frame {
    int d = 0;
    int j = 0;
    std::array<Vec, kMaxDim> cols;

    const Vec& col(int i) const { return cols[static_cast<size_t>(i)]; }

    // max_{ik} |<col_i, col_k> - delta_ik|
    double orthonormality_residual() const {
        double r = 0.0;
        for (int i = 0; i < j; ++i)
            for (int k = i; k < j; ++k)
                r = std::max(r, std::abs(dot(cols[i], cols[k]) - (i == k ? 1.0 : 0.0)));
        return r;
    }
};

inline Frame identity_frame(int d) {
    Frame f;
    f.d = d;
    f.j = d;
    for (int i = 0; i < d; ++i) f.cols[static_cast<size_t>(i)] = unit_axis(d, i);
    return f;
}

// Coordinates of the orthogonal projection of x onto span(L), in the frame basis.
inline Vec project(const Vec& x, const Frame& L) {
    if (x.dim() != L.d) throw dimension_error("project: dimension mismatch");
    Vec y(L.j);
    for (int i = 0; i < L.j; ++i) y[i] = dot(x, L.col(i));
    return y;
}

// Embed frame coordinates back into R^d.
inline Vec lift(const Vec& y, const Frame& L) {
    if (y.dim() != L.j) throw dimension_error("lift: dimension mismatch");
    Vec x(L.d);
    for (int i = 0; i < L.j; ++i) x += y[i] * L.col(i);
    return x;
}

// Rotation-invariant unit direction (normalized Gaussian).
inline Vec random_unit_vector(int d, RandomStream& rng) {
    if (d < 2) throw dimension_error("random_unit_vector: d must be >= 2");
    Vec v(d);
    double n2;
    do {
        for (int i = 0; i < d; ++i) v[i] = rng.gaussian();
        n2 = norm2(v);
    } while (n2 < 1e-24);
    return (1.0 / std::sqrt(n2)) * v;
}

// Haar-distributed j-frame: Gram-Schmidt QR of a d x j Gaussian matrix.
// The triangular factor has positive diagonal by construction, so the
// column frame is uniquely determined and Haar distributed.
inline Frame random_subspace(int d, int j, RandomStream& rng) {
    if (j < 1 || j > d) throw dimension_error("random_subspace: need 1 <= j <= d");
    Frame f;
    f.d = d;
    f.j = j;
    for (int c = 0; c < j; ++c) {
        Vec v(d);
        double n2;
        do {
            for (int i = 0; i < d; ++i) v[i] = rng.gaussian();
            // two orthogonalization passes keep the residual near machine precision
            for (int pass = 0; pass < 2; ++pass)
                for (int k = 0; k < c; ++k) v -= dot(v, f.cols[static_cast<size_t>(k)]) * f.cols[static_cast<size_t>(k)];
            n2 = norm2(v);
        } while (n2 < 1e-24);
        f.cols[static_cast<size_t>(c)] = (1.0 / std::sqrt(n2)) * v;
    }
    return f;
}

// Haar-random rotation of R^d as a d-frame (used to derandomize fixed direction sets).
inline Frame random_rotation(int d, RandomStream& rng) { return random_subspace(d, d, rng); }

inline Vec apply_rotation(const Frame& R, const Vec& x) {
    Vec y(R.d);
    for (int c = 0; c < R.d; ++c) {
        const Vec& col = R.col(c);
        for (int i = 0; i < R.d; ++i) y[i] += col[i] * x[c];
    }
    return y;
}

// ---- tiny dense solvers (n <= kMaxDim + 2) ----

inline constexpr int kMaxSolve = kMaxDim + 2;

// Gaussian elimination with partial pivoting; A is row-major n x n, solves in place.
inline bool solve_linear(int n, std::array<double, kMaxSolve * kMaxSolve>& A,
                         std::array<double, kMaxSolve>& b) {
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[r * kMaxSolve + c]) > std::abs(A[piv * kMaxSolve + c])) piv = r;
        if (std::abs(A[piv * kMaxSolve + c]) < 1e-300) return false;
        if (piv != c) {
            for (int k = c; k < n; ++k) std::swap(A[c * kMaxSolve + k], A[piv * kMaxSolve + k]);
            std::swap(b[c], b[piv]);
        }
        const double inv = 1.0 / A[c * kMaxSolve + c];
        for (int r = c + 1; r < n; ++r) {
            const double m = A[r * kMaxSolve + c] * inv;
            if (m == 0.0) continue;
            for (int k = c; k < n; ++k) A[r * kMaxSolve + k] -= m * A[c * kMaxSolve + k];
            b[r] -= m * b[c];
        }
    }
    for (int c = n - 1; c >= 0; --c) {
        double s = b[c];
        for (int k = c + 1; k < n; ++k) s -= A[c * kMaxSolve + k] * b[k];
        b[c] = s / A[c * kMaxSolve + c];
    }
    return true;
}

// Symmetric n x n matrix in a flat row-major array.
struct SymMat {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim> a{};
    double& at(int i, int k) { return a[static_cast<size_t>(i * n + k)]; }
    double at(int i, int k) const { return a[static_cast<size_t>(i * n + k)]; }
};

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations (ascending order).
inline std::array<double, kMaxDim> jacobi_eigenvalues(SymMat m) {
    const int n = m.n;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += m.at(p, q) * m.at(p, q);
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = m.at(p, q);
                if (std::abs(apq) < 1e-30) continue;
                const double theta = (m.at(q, q) - m.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m.at(k, p), mkq = m.at(k, q);
                    m.at(k, p) = c * mkp - s * mkq;
                    m.at(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m.at(p, k), mqk = m.at(q, k);
                    m.at(p, k) = c * mpk - s * mqk;
                    m.at(q, k) = s * mpk + c * mqk;
                }
            }
    }
    std::array<double, kMaxDim> ev{};
    for (int i = 0; i < n; ++i) ev[static_cast<size_t>(i)] = m.at(i, i);
    std::sort(ev.begin(), ev.begin() + n);
    return ev;
}

}  // namespace randpoly
