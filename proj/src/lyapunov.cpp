#include "phlab/lyapunov.hpp"

#include <algorithm>
#include <cmath>

#include "phlab/errors.hpp"
#include "phlab/parallel.hpp"
#include "phlab/rng.hpp"

namespace phlab::lyap {

using fibred::FibredSystem;
using fibred::SystemPoint;

namespace {

std::vector<long long> checkpoint_grid(long long n_iter) {
    std::vector<long long> out;
    for (long long decade = 1000; decade <= n_iter; decade *= 10) {
        for (long long mult : {1, 2, 5}) {
            long long v = decade * mult;
            if (v <= n_iter) out.push_back(v);
        }
    }
    if (out.empty() || out.back() != n_iter) out.push_back(n_iter);
    return out;
}

struct OrbitResult {
    double lp = 0.0, lm = 0.0;
    double det_mean = 0.0;
    std::vector<ConvergencePoint> series;
};

OrbitResult run_orbit(const FibredSystem& f, long long n_iter, std::uint64_t orbit_seed,
                      const std::vector<long long>& checkpoints) {
    Rng rng(orbit_seed);
    SystemPoint p{{rng.uniform(), rng.uniform()}, f.random_fibre_point(rng)};
    // random initial frame keeps the finite-n error generic
    Mat2 q = Mat2::rotation(2.0 * M_PI * rng.uniform());
    double s1 = 0.0, s2 = 0.0, sdet = 0.0;
    OrbitResult out;
    std::size_t ck = 0;
    for (long long i = 1; i <= n_iter; ++i) {
        auto [next, jac] = f.step(p);
        p = next;
        auto dec = qr2(jac * q);
        q = dec.q;
        s1 += std::log(dec.r11);
        s2 += std::log(dec.r22);
        sdet += std::log(std::abs(jac.det()));
        if (ck < checkpoints.size() && i == checkpoints[ck]) {
            double a = s1 / double(i), b = s2 / double(i);
            out.series.push_back({i, std::max(a, b), std::min(a, b)});
            ++ck;
        }
    }
    if (!std::isfinite(s1) || !std::isfinite(s2))
        throw Error(ErrorCode::NoConvergence, "renormalization fault: accumulator not finite");
    double a = s1 / double(n_iter), b = s2 / double(n_iter);
    out.lp = std::max(a, b);
    out.lm = std::min(a, b);
    out.det_mean = sdet / double(n_iter);
    return out;
}

// L-invariant inner product of an elliptic matrix via order averaging, and the
// symmetric square root of its representative.
Mat2 adapted_frame(const fibred::EllipticMatrix& L) {
    Mat2 q{0, 0, 0, 0};
    Mat2 pk = Mat2::identity();
    for (int k = 0; k < L.order; ++k) {
        q = q + pk.transpose() * pk;
        pk = L.mat() * pk;
    }
    q = q * (1.0 / double(L.order));
    double dt = std::sqrt(q.det());
    q = q * (1.0 / dt);
    double s = std::sqrt(q.det());
    double t = std::sqrt(q.a + q.d + 2.0 * s);
    return (q + Mat2{s, 0, 0, s}) * (1.0 / t);
}

}  // namespace

ExponentEstimate centre_exponents(const FibredSystem& f, const ExponentParams& params,
                                  std::vector<ConvergencePoint>* series) {
    if (params.n_iter < 1000)
        throw Error(ErrorCode::ConfigInvalid, "n_iter must be at least 10^3");
    if (params.n_orbits < 1) throw Error(ErrorCode::ConfigInvalid, "n_orbits must be positive");

    std::vector<long long> checkpoints =
        (series || params.record_series) ? checkpoint_grid(params.n_iter) : std::vector<long long>{};

    std::vector<OrbitResult> results(params.n_orbits);
    parallel_for(params.n_orbits, params.workers, [&](int k) {
        results[k] = run_orbit(f, params.n_iter, derive_seed(params.seed, k), checkpoints);
    });

    ExponentEstimate est;
    est.n_iter = params.n_iter;
    est.n_orbits = params.n_orbits;
    est.seed = params.seed;
    double mp = 0.0, mm = 0.0, md = 0.0;
    for (const auto& r : results) {
        mp += r.lp;
        mm += r.lm;
        md += r.det_mean;
    }
    mp /= params.n_orbits;
    mm /= params.n_orbits;
    md /= params.n_orbits;
    double vp = 0.0, vm = 0.0;
    double lo = results[0].lp, hi = results[0].lp;
    for (const auto& r : results) {
        vp += (r.lp - mp) * (r.lp - mp);
        vm += (r.lm - mm) * (r.lm - mm);
        lo = std::min(lo, r.lp);
        hi = std::max(hi, r.lp);
    }
    int denom = std::max(1, params.n_orbits - 1);
    est.lambda_plus = mp;
    est.lambda_minus = mm;
    est.stderr_plus = std::sqrt(vp / denom / params.n_orbits);
    est.stderr_minus = std::sqrt(vm / denom / params.n_orbits);
    est.det_log_mean = md;
    est.inter_orbit_spread = hi - lo;

    if (series) {
        series->clear();
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            ConvergencePoint pt{checkpoints[c], 0.0, 0.0, 0.0};
            for (const auto& r : results) {
                pt.lambda_plus += r.series[c].lambda_plus;
                pt.lambda_minus += r.series[c].lambda_minus;
            }
            pt.lambda_plus /= params.n_orbits;
            pt.lambda_minus /= params.n_orbits;
            double var = 0.0;
            for (const auto& r : results) {
                double d = r.series[c].lambda_plus - pt.lambda_plus;
                var += d * d;
            }
            pt.stderr_plus = std::sqrt(var / denom / params.n_orbits);
            series->push_back(pt);
        }
    }
    return est;
}

double check_symplectic_symmetry(const ExponentEstimate& est) {
    return std::abs(est.lambda_plus + est.lambda_minus);
}

BunchingCertificate certify_bunching(const FibredSystem& f, const BunchingParams& params) {
    BunchingCertificate cert;
    cert.base_grid = params.base_grid;
    cert.fibre_grid = params.fibre_grid;
    cert.nu = std::abs(f.base().lambda_s);
    cert.nu_hat = 1.0 / std::abs(f.base().lambda_u);

    Mat2 frame = Mat2::identity();
    Mat2 frame_inv = Mat2::identity();
    if (const auto* a = std::get_if<fibred::AffineSpec>(&f.spec())) {
        if (a->L.order >= 3) {
            frame = adapted_frame(a->L);
            frame_inv = frame.inverse();
            cert.adapted_frame = true;
        }
    }

    const int nb = params.base_grid, nf = params.fibre_grid;
    std::vector<double> row_min(nb * nb, 1e300), row_max(nb * nb, 0.0), row_cond(nb * nb, 0.0);
    parallel_for(nb * nb, params.workers, [&](int cell) {
        int i = cell / nb, j = cell % nb;
        base::ToralPoint x{(i + 0.5) / nb, (j + 0.5) / nb};
        double mn = 1e300, mx = 0.0, cond = 0.0;
        for (int k = 0; k < nf; ++k) {
            for (int l = 0; l < nf; ++l) {
                fibred::FibrePoint v;
                if (f.fibre_kind() == fibred::FibreKind::Torus) {
                    v = Vec2{(k + 0.5) / nf, (l + 0.5) / nf};
                } else {
                    double Z = -1.0 + 2.0 * (k + 0.5) / nf;
                    double phi = 2.0 * M_PI * (l + 0.5) / nf;
                    double r = std::sqrt(std::max(0.0, 1.0 - Z * Z));
                    v = fibred::SpherePoint{r * std::cos(phi), r * std::sin(phi), Z};
                }
                Mat2 jac = frame * f.centre_jacobian({x, v}) * frame_inv;
                auto sv = singular_values(jac);
                mn = std::min(mn, sv[1]);
                mx = std::max(mx, sv[0]);
                cond = std::max(cond, sv[0] / sv[1]);
            }
        }
        row_min[cell] = mn;
        row_max[cell] = mx;
        row_cond[cell] = cond;
    });
    double smin = 1e300, smax = 0.0, cond = 0.0;
    for (int c = 0; c < nb * nb; ++c) {
        smin = std::min(smin, row_min[c]);
        smax = std::max(smax, row_max[c]);
        cond = std::max(cond, row_cond[c]);
    }

    // Lipschitz slack from the spec's Fourier data, inflated by the frame
    // conditioning, converts grid sampling into a certified bound. Cell
    // centres are at most half a cell diagonal from any point.
    auto lip = f.jacobian_lipschitz_bound();
    double frame_cond = singular_values(frame)[0] / singular_values(frame)[1];
    cert.lipschitz_slack =
        frame_cond * (lip[0] * (M_SQRT2 / (2.0 * nb)) + lip[1] * (M_SQRT2 / (2.0 * nf)));

    double gamma = std::max(smin - cert.lipschitz_slack, 1e-300);
    double sup_sigma = smax + cert.lipschitz_slack;
    cert.gamma = gamma;
    cert.sup_sigma = sup_sigma;
    cert.gamma_hat = 1.0 / sup_sigma;
    cert.margin = cert.nu - cert.gamma * cert.gamma_hat;
    cert.margin_hat = cert.nu_hat - cert.gamma * cert.gamma_hat;
    double cond_slacked = cond + cert.lipschitz_slack * (1.0 + cond);
    cert.fibre_bunching_margin =
        std::max(cond_slacked * cert.nu - 1.0, cond_slacked * cert.nu_hat - 1.0);
    cert.passed = cert.margin < 0.0 && cert.margin_hat < 0.0 && cert.fibre_bunching_margin < 0.0;
    return cert;
}

}  // namespace phlab::lyap
