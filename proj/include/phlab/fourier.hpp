#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "phlab/linalg.hpp"

namespace phlab {

// Real trigonometric series on the circle: a(t) = sum amp * sin(2 pi k t + phase).
struct Fourier1 {
    struct Harmonic {
        int k = 1;
        double amp = 0.0;
        double phase = 0.0;
    };
    std::vector<Harmonic> harmonics;

    double eval(double t) const {
        double s = 0.0;
        for (const auto& h : harmonics) s += h.amp * std::sin(2.0 * M_PI * h.k * t + h.phase);
        return s;
    }
    double deriv(double t) const {
        double s = 0.0;
        for (const auto& h : harmonics)
            s += h.amp * 2.0 * M_PI * h.k * std::cos(2.0 * M_PI * h.k * t + h.phase);
        return s;
    }
    double sup_deriv() const {
        double s = 0.0;
        for (const auto& h : harmonics) s += std::abs(h.amp * 2.0 * M_PI * h.k);
        return s;
    }
    double sup_deriv2() const {
        double s = 0.0;
        for (const auto& h : harmonics) s += std::abs(h.amp) * 4.0 * M_PI * M_PI * h.k * h.k;
        return s;
    }
    bool empty() const { return harmonics.empty(); }
};

// R^2-valued trigonometric map on T^2: w_j(x) = sum Re(c_j * e^{2 pi i k.x}).
struct FourierMapT2 {
    struct Harmonic {
        std::array<int, 2> k{0, 0};
        std::complex<double> c1{0.0, 0.0};
        std::complex<double> c2{0.0, 0.0};
    };
    std::vector<Harmonic> harmonics;

    Vec2 eval(const Vec2& x) const {
        double w1 = 0.0, w2 = 0.0;
        for (const auto& h : harmonics) {
            double ph = 2.0 * M_PI * (h.k[0] * x.x + h.k[1] * x.y);
            double cs = std::cos(ph), sn = std::sin(ph);
            w1 += h.c1.real() * cs - h.c1.imag() * sn;
            w2 += h.c2.real() * cs - h.c2.imag() * sn;
        }
        return {w1, w2};
    }

    // d w_j / d x_i
    Mat2 jacobian(const Vec2& x) const {
        Mat2 j{0, 0, 0, 0};
        for (const auto& h : harmonics) {
            double ph = 2.0 * M_PI * (h.k[0] * x.x + h.k[1] * x.y);
            double cs = std::cos(ph), sn = std::sin(ph);
            // d/dx_i Re(c e^{i ph}) = -2 pi k_i (Re c * sin + Im c * cos)
            double g1 = -2.0 * M_PI * (h.c1.real() * sn + h.c1.imag() * cs);
            double g2 = -2.0 * M_PI * (h.c2.real() * sn + h.c2.imag() * cs);
            j.a += h.k[0] * g1;
            j.b += h.k[1] * g1;
            j.c += h.k[0] * g2;
            j.d += h.k[1] * g2;
        }
        return j;
    }

    double c1_norm() const {
        double s = 0.0;
        for (const auto& h : harmonics) {
            double kn = std::hypot(double(h.k[0]), double(h.k[1]));
            s += 2.0 * M_PI * kn * (std::abs(h.c1) + std::abs(h.c2));
        }
        return s;
    }
    bool empty() const { return harmonics.empty(); }
};

// Complex-valued trigonometric function on T^2 (no reality constraint).
struct ComplexFourierT2 {
    struct Harmonic {
        std::array<int, 2> k{0, 0};
        std::complex<double> c{0.0, 0.0};
    };
    std::vector<Harmonic> harmonics;

    std::complex<double> eval(const Vec2& x) const {
        std::complex<double> s{0.0, 0.0};
        for (const auto& h : harmonics) {
            double ph = 2.0 * M_PI * (h.k[0] * x.x + h.k[1] * x.y);
            s += h.c * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        return s;
    }
    bool empty() const { return harmonics.empty(); }
};

// Scalar shear profile coupled to the base: s(t, x) = sum amp * sin(2 pi (kt*t + kx.x) + phase).
struct CoupledShear {
    struct Harmonic {
        int kt = 1;
        std::array<int, 2> kx{0, 0};
        double amp = 0.0;
        double phase = 0.0;
    };
    std::vector<Harmonic> harmonics;

    double eval(double t, const Vec2& x) const {
        double s = 0.0;
        for (const auto& h : harmonics)
            s += h.amp * std::sin(2.0 * M_PI * (h.kt * t + h.kx[0] * x.x + h.kx[1] * x.y) + h.phase);
        return s;
    }
    double dt(double t, const Vec2& x) const {
        double s = 0.0;
        for (const auto& h : harmonics)
            s += h.amp * 2.0 * M_PI * h.kt *
                 std::cos(2.0 * M_PI * (h.kt * t + h.kx[0] * x.x + h.kx[1] * x.y) + h.phase);
        return s;
    }
    double sup_dt() const {
        double s = 0.0;
        for (const auto& h : harmonics) s += std::abs(h.amp * 2.0 * M_PI * h.kt);
        return s;
    }
    // Bound on the gradient of dt with respect to (t, x1, x2).
    double sup_dt_grad() const {
        double s = 0.0;
        for (const auto& h : harmonics) {
            double kn = std::abs(double(h.kt)) + std::abs(double(h.kx[0])) + std::abs(double(h.kx[1]));
            s += std::abs(h.amp) * 4.0 * M_PI * M_PI * std::abs(double(h.kt)) * kn;
        }
        return s;
    }
    bool empty() const { return harmonics.empty(); }
};

}  // namespace phlab
