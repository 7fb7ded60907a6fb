#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "phlab/errors.hpp"

namespace phlab {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Row-major 2x2 real matrix.
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    Mat2() = default;
    Mat2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

    static Mat2 identity() { return {1, 0, 0, 1}; }
    static Mat2 rotation(double t) {
        double cs = std::cos(t), sn = std::sin(t);
        return {cs, -sn, sn, cs};
    }
    // Matrix of z -> w*z acting on (Re, Im).
    static Mat2 complex_mul(std::complex<double> w) {
        return {w.real(), -w.imag(), w.imag(), w.real()};
    }

    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 operator*(const Mat2& m) const {
        return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
    }
    Mat2 operator+(const Mat2& m) const { return {a + m.a, b + m.b, c + m.c, d + m.d}; }
    Mat2 operator-(const Mat2& m) const { return {a - m.a, b - m.b, c - m.c, d - m.d}; }
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    Mat2 transpose() const { return {a, c, b, d}; }

    Mat2 inverse() const {
        double dt = det();
        if (std::abs(dt) < 1e-300) throw Error(ErrorCode::SingularMatrix, "2x2 inverse");
        double s = 1.0 / dt;
        return {d * s, -b * s, -c * s, a * s};
    }

    double frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }

    double max_abs_entry() const {
        return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
    }
};

// Singular values of a 2x2 matrix, closed form. Returns {sigma_max, sigma_min}.
inline std::array<double, 2> singular_values(const Mat2& m) {
    double e = (m.a + m.d) * 0.5, f = (m.a - m.d) * 0.5;
    double g = (m.c + m.b) * 0.5, h = (m.c - m.b) * 0.5;
    double q = std::hypot(e, h), r = std::hypot(f, g);
    return {q + r, std::abs(q - r)};
}

inline double spectral_norm(const Mat2& m) { return singular_values(m)[0]; }

// Gram-Schmidt QR of a 2x2 matrix; Q orthogonal, R upper triangular with positive diagonal.
struct QR2 {
    Mat2 q;
    double r11, r12, r22;
};

inline QR2 qr2(const Mat2& m) {
    double n1 = std::hypot(m.a, m.c);
    if (n1 == 0.0) throw Error(ErrorCode::SingularMatrix, "qr2: zero column");
    double q1x = m.a / n1, q1y = m.c / n1;
    double r12 = q1x * m.b + q1y * m.d;
    double ux = m.b - r12 * q1x, uy = m.d - r12 * q1y;
    double n2 = std::hypot(ux, uy);
    if (n2 == 0.0) throw Error(ErrorCode::SingularMatrix, "qr2: rank deficient");
    QR2 out;
    out.q = Mat2{q1x, ux / n2, q1y, uy / n2};
    out.r11 = n1;
    out.r12 = r12;
    out.r22 = n2;
    return out;
}

// Reduce to [0,1). Exact for representable values; maps 1.0-eps rounding artefacts back to 0.
inline double mod1(double x) {
    double r = x - std::floor(x);
    return (r >= 1.0) ? 0.0 : r;
}

inline double mod_pi(double t) {
    double r = t - std::floor(t / M_PI) * M_PI;
    return (r >= M_PI) ? 0.0 : r;
}

inline double mod_2pi(double t) {
    double r = t - std::floor(t / (2.0 * M_PI)) * (2.0 * M_PI);
    return (r >= 2.0 * M_PI) ? 0.0 : r;
}

// Signed distance on R/Z in (-1/2, 1/2].
inline double wrap_half(double d) {
    double r = d - std::round(d);
    return r;
}

inline double torus_dist(const Vec2& p, const Vec2& q) {
    return std::hypot(wrap_half(p.x - q.x), wrap_half(p.y - q.y));
}

// Distance on RP^1 with angles in [0, pi).
inline double proj_dist(double t1, double t2) {
    double d = std::abs(t1 - t2);
    d = std::fmod(d, M_PI);
    return std::min(d, M_PI - d);
}

// Circle distance for angles in [0, 2pi).
inline double circle_dist(double t1, double t2) {
    double d = std::abs(t1 - t2);
    d = std::fmod(d, 2.0 * M_PI);
    return std::min(d, 2.0 * M_PI - d);
}

}  // namespace phlab
