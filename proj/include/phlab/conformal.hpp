#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "phlab/fibred.hpp"
#include "phlab/projective.hpp"

namespace phlab::conformal {

using Complex = std::complex<double>;

// Element of PSL(2,R) acting on the upper half-plane, normalised ad - bc = 1.
struct MoebiusReal {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static MoebiusReal from_matrix(const Mat2& m);
    Complex apply(Complex z) const { return (a * z + b) / (c * z + d); }
};

// Boundary identification RP^1 <-> circle used throughout: the direction
// angle theta maps to cot(theta) on the boundary of H and then through the
// Cayley transform to e^{-2 i theta} on the unit circle.
double proj_to_circle(double theta);
double circle_to_proj(double angle);

Complex half_plane_to_disc(Complex z);  // (z - i)/(z + i)
Complex disc_to_half_plane(Complex w);  // i (1 + w)/(1 - w)

double hyperbolic_distance(Complex t1, Complex t2);

struct CircleMeasure {
    struct Atom {
        double angle = 0.0;  // position e^{i angle} on the unit circle
        double mass = 0.0;
    };
    std::vector<Atom> atoms;

    double total() const;
    double max_atom_mass() const;  // largest 3-neighbourhood concentration
};

CircleMeasure circle_measure_from_conditional(const projective::FibreConditional& c);

// The disc-model barycentre vector field xi_m(w) = int (zeta - w)/(1 - conj(w) zeta) dm.
Complex disc_field(const CircleMeasure& m, Complex w);

struct BarycentreResult {
    Complex w;               // disc point
    double field_norm = 0.0; // |xi_m| at exit
    int iterations = 0;
};

// Unique zero of the disc field, by damped Newton with a compass-search
// fallback. Requires max atom mass < 1/2 (with slack).
BarycentreResult barycentre(const CircleMeasure& m, double tol = 1e-12,
                            double heavy_slack = 0.05);

struct ConformalStructureTau {
    Complex tau{0.0, 1.0};

    // SPD det-1 representative (1/Im tau) [[1, -Re tau], [-Re tau, |tau|^2]];
    // the inner product fixed by the stabiliser of the barycentre.
    Mat2 representative() const;
    static ConformalStructureTau from_representative(const Mat2& q);
};

// Structure whose class is the pushforward of `s` under the linear map A.
ConformalStructureTau pushforward_structure(const ConformalStructureTau& s, const Mat2& A);

ConformalStructureTau structure_from_measure(const projective::FibreConditional& c,
                                             double tol = 1e-12, double heavy_slack = 0.05);

// Fixed point in H of the Moebius action of an elliptic L in SL(2,Z);
// requires order >= 3 (orders 1 and 2 fix every structure).
ConformalStructureTau invariant_structure_of(const fibred::EllipticMatrix& L);

struct BarycentreField {
    int base_n = 0, fibre_n = 0;
    std::vector<Complex> tau;          // indexed like DisintegrationField cells
    std::vector<std::uint8_t> valid;
    double oscillation = 0.0;          // max hyperbolic distance between neighbours
    Complex mean_tau{0.0, 1.0};
    int n_valid = 0;

    const Complex& cell_tau(int cell) const { return tau[cell]; }
};

struct BarycentreFieldParams {
    long long min_samples = 50;
    double tol = 1e-10;
    double heavy_slack = 0.05;
    int workers = 1;
};

BarycentreField barycentre_field(const projective::DisintegrationField& field,
                                 const BarycentreFieldParams& params = {});

}  // namespace phlab::conformal
