#pragma once

#include <array>
#include <complex>
#include <optional>
#include <variant>

#include "phlab/base.hpp"
#include "phlab/fourier.hpp"
#include "phlab/linalg.hpp"
#include "phlab/rng.hpp"

namespace phlab::fibred {

using Complex = std::complex<double>;

// Elliptic element of SL(2,Z); order is one of 1, 2, 3, 4, 6.
struct EllipticMatrix {
    std::array<std::array<long long, 2>, 2> entries{{{1, 0}, {0, 1}}};
    int order = 1;

    Mat2 mat() const {
        return {double(entries[0][0]), double(entries[0][1]), double(entries[1][0]),
                double(entries[1][1])};
    }
    Mat2 inv_mat() const {  // adjugate; det = 1
        return {double(entries[1][1]), -double(entries[0][1]), -double(entries[1][0]),
                double(entries[0][0])};
    }
};

int elliptic_order(const std::array<std::array<long long, 2>, 2>& m);
EllipticMatrix make_elliptic(const std::array<std::array<long long, 2>, 2>& m);

// Point of S^2 as a unit 3-vector.
struct SpherePoint {
    double X = 0.0, Y = 0.0, Z = -1.0;

    SpherePoint() = default;
    SpherePoint(double x, double y, double z) : X(x), Y(y), Z(z) {}
};

// Extended complex plane value (stereographic chart from the north pole).
struct ExtComplex {
    Complex z{0.0, 0.0};
    bool infinite = false;
};

ExtComplex stereographic(const SpherePoint& p);
SpherePoint stereographic_inverse(const ExtComplex& z);
double jacobian_P_inverse(const Complex& z);  // 4 / (1 + |z|^2)^2

// Homogeneous CP^1 coordinates; robust through the poles.
struct Homog {
    Complex h1{0.0, 0.0}, h2{1.0, 0.0};
};
Homog to_homog(const SpherePoint& p);
SpherePoint from_homog(const Homog& h);

using FibrePoint = std::variant<Vec2, SpherePoint>;

enum class FibreKind { Torus, Sphere };

struct SystemPoint {
    base::ToralPoint x;
    FibrePoint v;
};

double fibre_dist(const FibrePoint& a, const FibrePoint& b);

// ---- fibre map specifications -------------------------------------------

struct AffineSpec {
    EllipticMatrix L;
    FourierMapT2 w;  // translation part, evaluated mod 1
};

struct ShearSpec {
    Fourier1 alpha;
    FourierMapT2 w;
};

// Affine composed with two transverse base-coupled shears. The composition
// keeps det D^c identically 1.
struct PerturbedAffineSpec {
    AffineSpec core;
    double eps = 0.0;
    CoupledShear shear1;  // v1 += eps * s1(v2, x)
    CoupledShear shear2;  // v2 += eps * s2(v1, x), applied second
};

// Scalar function on T^2: c0 + sum amp * sin(2 pi k.x + phase).
struct ScalarFourierT2 {
    double c0 = 0.0;
    struct Harmonic {
        std::array<int, 2> k{0, 0};
        double amp = 0.0;
        double phase = 0.0;
    };
    std::vector<Harmonic> harmonics;

    double eval(const Vec2& x) const {
        double s = c0;
        for (const auto& h : harmonics)
            s += h.amp * std::sin(2.0 * M_PI * (h.k[0] * x.x + h.k[1] * x.y) + h.phase);
        return s;
    }
};

struct MoebiusSpec {
    enum class Mode { Rotation, General };
    Mode mode = Mode::Rotation;
    // Rotation mode: rotation by angle(x) about the fixed unit axis.
    std::array<double, 3> axis{0.0, 0.0, 1.0};
    ScalarFourierT2 angle;
    // General mode: raw coefficients, normalised to ad - bc = 1 per evaluation.
    ComplexFourierT2 a, b, c, d;
};

// Latitude profile for an area-preserving twist, psi(Z) = sum coeffs[k] Z^k.
struct TwistProfile {
    std::vector<double> coeffs;

    double eval(double Z) const {
        double s = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 0;) s = s * Z + coeffs[k];
        return s;
    }
    double deriv(double Z) const {
        double s = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 1;) s = s * Z + coeffs[k] * double(k);
        return s;
    }
    bool empty() const { return coeffs.empty(); }
};

// Moebius composed with two area-preserving latitude twists (about the z- and
// x-axes), each by angle eps * psi(latitude).
struct PerturbedMoebiusSpec {
    MoebiusSpec core;
    double eps = 0.0;
    TwistProfile twist_z;
    TwistProfile twist_x;
};

using FibreSpec =
    std::variant<AffineSpec, ShearSpec, PerturbedAffineSpec, MoebiusSpec, PerturbedMoebiusSpec>;

// ---- the skew product -----------------------------------------------------

class FibredSystem {
  public:
    FibredSystem(base::ToralAutomorphism g, FibreSpec spec);

    const base::ToralAutomorphism& base() const { return base_; }
    FibreKind fibre_kind() const { return kind_; }
    const FibreSpec& spec() const { return spec_; }

    SystemPoint evaluate(const SystemPoint& p) const;
    SystemPoint invert(const SystemPoint& p) const;

    // Exact derivative of the fibre map along the fibre, base frozen. For
    // sphere fibres the matrix is expressed in orthonormal frames of the
    // round metric attached to the hemisphere charts.
    Mat2 centre_jacobian(const SystemPoint& p) const;

    double fibre_area_jacobian(const SystemPoint& p) const;

    // One step returning the image and the centre Jacobian together.
    std::pair<SystemPoint, Mat2> step(const SystemPoint& p) const;

    // Fibre map at frozen base point x (the map Gamma_x), and its inverse.
    FibrePoint fibre_map(const base::ToralPoint& x, const FibrePoint& v) const;
    FibrePoint fibre_map_inverse(const base::ToralPoint& x, const FibrePoint& v) const;

    bool fibre_volume_preserving() const;

    // Lipschitz bounds for the map (x, v) -> D^c f with respect to the base
    // and fibre coordinates, used as certification slack.
    std::array<double, 2> jacobian_lipschitz_bound() const;

    // Uniform fibre point from a seeded stream.
    FibrePoint random_fibre_point(Rng& rng) const;

  private:
    base::ToralAutomorphism base_;
    FibreKind kind_;
    FibreSpec spec_;

    void validate() const;
};

}  // namespace phlab::fibred
