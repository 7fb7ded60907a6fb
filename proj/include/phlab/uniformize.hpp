#pragma once

#include <array>
#include <complex>
#include <vector>

#include "phlab/conformal.hpp"
#include "phlab/fibred.hpp"
#include "phlab/trichotomy.hpp"

namespace phlab::uniformize {

using Complex = std::complex<double>;

// Samples of a Beltrami coefficient on a uniform N x N grid over T^2,
// value index (iy * n + ix) at z = ix/n + i iy/n.
struct BeltramiGrid {
    int n = 128;
    std::vector<Complex> mu;

    static BeltramiGrid constant(int n, Complex c);
    template <class F>
    static BeltramiGrid from_function(int n, F&& fn) {
        BeltramiGrid g;
        g.n = n;
        g.mu.resize(std::size_t(n) * n);
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix)
                g.mu[std::size_t(iy) * n + ix] = fn(double(ix) / n, double(iy) / n);
        return g;
    }

    double sup_mu() const;
};

// Solution w(z) = A z + B conj(z) + phi(z) - phi(0) of the periodic Beltrami
// equation, with phi doubly periodic and mean zero, normalised so w(0) = 0
// and w(1) = 1 (A + B = 1).
class PeriodicQcMap {
  public:
    int n = 0;
    Complex A{1.0, 0.0}, B{0.0, 0.0};
    std::vector<Complex> phi_hat;  // Fourier coefficients, phi_hat[0] = 0
    double residual = 0.0;
    int iterations = 0;

    Complex value(Complex z) const;              // spectral evaluation of the lift
    Complex phi_value(Complex z) const;
    void derivatives(Complex z, Complex& wz, Complex& wzb) const;
    Complex inverse(Complex target, double tol = 1e-12) const;

    Complex period_1() const { return A + B; }
    Complex period_i() const { return Complex{0, 1} * (A - B); }
};

struct BeltramiSolveParams {
    double tol = 1e-10;
    int max_iter = 600;
};

PeriodicQcMap solve_beltrami_periodic(const BeltramiGrid& mu,
                                      const BeltramiSolveParams& params = {});

// Independent residual check: 4th-order central finite differences of the
// sampled w against mu w_z.
double finite_difference_residual(const BeltramiGrid& mu, const PeriodicQcMap& w);

struct LatticeParam {
    Complex tau{0.0, 1.0};
};

LatticeParam lattice_parameter(const PeriodicQcMap& w);

// Beltrami coefficient of the conformal structure with parameter tau.
Complex mu_of_tau(Complex tau);

struct AffineModelReport {
    std::array<std::array<long long, 2>, 2> L{{{1, 0}, {0, 1}}};
    int order = 1;
    long long trace = 2;
    Complex tau{0.0, 1.0};         // common lattice parameter
    double tau_oscillation = 0.0;  // hyperbolic spread of per-cell lattice params
    std::vector<Complex> a_cells;  // rotation part per base cell
    std::vector<Complex> b_cells;  // translation part per base cell (solved coords)
    std::vector<Vec2> w_model;     // recovered translation map per base cell
    double max_abs_a_deviation = 0.0;
    double a_oscillation = 0.0;
    double max_conjugacy_defect = 0.0;
    double max_beltrami_residual = 0.0;
    int base_n = 0;
};

struct AffineModelParams {
    int grid_n = 64;         // Beltrami grid per base cell
    int fit_grid = 16;       // fibre samples for the affine fit
    int defect_grid = 32;    // fibre samples for the defect sup
    double beltrami_tol = 1e-9;
    double defect_gate = 1e-3;
    double a_const_gate = 1e-3;
    double integer_gate = 1e-3;
    int workers = 1;
};

AffineModelReport extract_affine_model(const fibred::FibredSystem& f,
                                       const projective::TrichotomyReport& report,
                                       const AffineModelParams& params = {});

struct MoebiusCoefficients {
    Complex a{1, 0}, b{0, 0}, c{0, 0}, d{1, 0};
};

// Gauge-fix a PSL(2,C) representative: det 1 and the largest coefficient real
// positive.
MoebiusCoefficients normalize_psl2c(const MoebiusCoefficients& m);

struct MoebiusModelReport {
    std::vector<MoebiusCoefficients> cells;  // selected fit per base cell
    double max_fit_defect = 0.0;             // defect of the selected fits
    double structure_max_fit_defect = 0.0;   // structure-normalised fit
    double naive_max_fit_defect = 0.0;       // plain chart fit
    int cells_structure_selected = 0;        // cells where normalisation won
    int base_n = 0;
};

struct MoebiusModelParams {
    int sample_band = 5;    // latitude bands (>= 12 samples, poles avoided)
    int sample_lon = 6;
    int defect_grid = 12;
    double defect_gate = 1e-3;
    bool enforce_defect_gate = false;
    int workers = 1;
};

MoebiusModelReport extract_moebius_model(const fibred::FibredSystem& f,
                                         const projective::TrichotomyReport& report,
                                         const MoebiusModelParams& params = {});

}  // namespace phlab::uniformize
