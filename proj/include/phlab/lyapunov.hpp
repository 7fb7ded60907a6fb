#pragma once

#include <cstdint>
#include <vector>

#include "phlab/fibred.hpp"

namespace phlab::lyap {

struct ExponentEstimate {
    double lambda_plus = 0.0, lambda_minus = 0.0;
    double stderr_plus = 0.0, stderr_minus = 0.0;
    long long n_iter = 0;
    int n_orbits = 0;
    std::uint64_t seed = 0;
    // (1/n) sum log |det D^c f| averaged over orbits; telescopes to 0 for
    // fibre-volume-preserving systems.
    double det_log_mean = 0.0;
    double inter_orbit_spread = 0.0;  // max - min of per-orbit lambda_plus

    double gap() const { return lambda_plus - lambda_minus; }
    double combined_stderr() const { return stderr_plus + stderr_minus; }
};

struct ConvergencePoint {
    long long n = 0;
    double lambda_plus = 0.0, lambda_minus = 0.0;
    double stderr_plus = 0.0;
};

struct ExponentParams {
    long long n_iter = 1000000;
    int n_orbits = 32;
    std::uint64_t seed = 1;
    int workers = 1;
    bool record_series = false;
};

ExponentEstimate centre_exponents(const fibred::FibredSystem& f, const ExponentParams& params,
                                  std::vector<ConvergencePoint>* series = nullptr);

// |lambda_plus + lambda_minus|; zero for area-preserving fibre cocycles.
double check_symplectic_symmetry(const ExponentEstimate& est);

struct BunchingCertificate {
    double nu = 0.0, nu_hat = 0.0;        // base contraction rates, exact
    double gamma = 0.0, gamma_hat = 0.0;  // centre rate bounds from the grid
    double sup_sigma = 0.0;               // sup of the largest singular value
    double margin = 0.0, margin_hat = 0.0;
    double fibre_bunching_margin = 0.0;
    double lipschitz_slack = 0.0;
    bool passed = false;
    bool adapted_frame = false;  // L-invariant inner product used for affine specs
    int base_grid = 0, fibre_grid = 0;
};

struct BunchingParams {
    int base_grid = 8;    // base sampled on base_grid^2 points
    int fibre_grid = 64;  // fibre sampled on fibre_grid^2 points
    int workers = 1;
};

BunchingCertificate certify_bunching(const fibred::FibredSystem& f,
                                     const BunchingParams& params = {});

}  // namespace phlab::lyap
