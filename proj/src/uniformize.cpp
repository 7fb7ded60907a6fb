#include "phlab/uniformize.hpp"

#include <algorithm>
#include <cmath>

#include "phlab/errors.hpp"
#include "phlab/fft.hpp"
#include "phlab/parallel.hpp"

namespace phlab::uniformize {

using fibred::FibredSystem;

BeltramiGrid BeltramiGrid::constant(int n, Complex c) {
    BeltramiGrid g;
    g.n = n;
    g.mu.assign(std::size_t(n) * n, c);
    return g;
}

double BeltramiGrid::sup_mu() const {
    double s = 0.0;
    for (const auto& m : mu) s = std::max(s, std::abs(m));
    return s;
}

namespace {

inline int signed_freq(int i, int n) { return (i <= n / 2) ? i : i - n; }

}  // namespace

Complex PeriodicQcMap::phi_value(Complex z) const {
    // direct evaluation of the trigonometric polynomial
    Complex acc{0.0, 0.0};
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const Complex& c = phi_hat[std::size_t(iy) * n + ix];
            if (c == Complex{0.0, 0.0}) continue;
            double ph = 2.0 * M_PI * (signed_freq(ix, n) * z.real() + signed_freq(iy, n) * z.imag());
            acc += c * Complex{std::cos(ph), std::sin(ph)};
        }
    }
    return acc;
}

Complex PeriodicQcMap::value(Complex z) const {
    return A * z + B * std::conj(z) + phi_value(z) - phi_value(Complex{0.0, 0.0});
}

void PeriodicQcMap::derivatives(Complex z, Complex& wz, Complex& wzb) const {
    Complex pz{0.0, 0.0}, pzb{0.0, 0.0};
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const Complex& c = phi_hat[std::size_t(iy) * n + ix];
            if (c == Complex{0.0, 0.0}) continue;
            double k1 = signed_freq(ix, n), k2 = signed_freq(iy, n);
            double ph = 2.0 * M_PI * (k1 * z.real() + k2 * z.imag());
            Complex e = c * Complex{std::cos(ph), std::sin(ph)};
            Complex kc{k1, k2};
            pz += e * Complex{0.0, M_PI} * std::conj(kc);
            pzb += e * Complex{0.0, M_PI} * kc;
        }
    }
    wz = A + pz;
    wzb = B + pzb;
}

Complex PeriodicQcMap::inverse(Complex target, double tol) const {
    // affine-part initial guess: solve A z + B conj(z) = target
    double det = std::norm(A) - std::norm(B);
    if (std::abs(det) < 1e-12) throw Error(ErrorCode::DegenerateLattice, "affine part singular");
    Complex z = (std::conj(A) * target - B * std::conj(target)) / det;
    double prev = 1e300;
    for (int it = 0; it < 60; ++it) {
        Complex r = value(z) - target;
        double rn = std::abs(r);
        if (rn < tol) return z;
        Complex wz, wzb;
        derivatives(z, wz, wzb);
        double jdet = std::norm(wz) - std::norm(wzb);
        if (std::abs(jdet) < 1e-14) break;
        Complex dz = (std::conj(wz) * r - wzb * std::conj(r)) / jdet;
        double step = 1.0;
        bool ok = false;
        for (int half = 0; half < 10; ++half) {
            Complex trial = z - step * dz;
            if (std::abs(value(trial) - target) < rn) {
                z = trial;
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if (!ok && rn > prev) break;
        prev = rn;
    }
    throw Error(ErrorCode::NoConvergence, "qc map inversion failed");
}

PeriodicQcMap solve_beltrami_periodic(const BeltramiGrid& mu, const BeltramiSolveParams& params) {
    const int n = mu.n;
    if (n <= 0 || (n & (n - 1)) != 0)
        throw Error(ErrorCode::ConfigInvalid, "grid size must be a power of two");
    double k = mu.sup_mu();
    if (k >= 0.95) throw Error(ErrorCode::SupMuTooLarge, "sup|mu| = " + std::to_string(k));

    const std::size_t sz = std::size_t(n) * n;
    std::vector<Complex> phi_z(sz, Complex{0, 0});
    std::vector<Complex> work(sz);
    Complex A{1.0, 0.0}, B{0.0, 0.0};

    PeriodicQcMap out;
    out.n = n;
    double best = 1e300;
    int stall = 0;
    for (int it = 0; it < params.max_iter; ++it) {
        // rho = mu (A + phi_z), pointwise
        for (std::size_t i = 0; i < sz; ++i) work[i] = mu.mu[i] * (A + phi_z[i]);
        fft2_inplace(work, n, false);
        for (auto& c : work) c /= double(sz);
        B = work[0];
        A = Complex{1.0, 0.0} - B;

        // Beurling multiplier conj(k)/k on non-zero frequencies gives phi_z;
        // keep hat(phi) for output and residual evaluation
        std::vector<Complex> phi_hat(sz, Complex{0, 0});
        std::vector<Complex> phi_zb_hat(sz, Complex{0, 0});
        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < n; ++ix) {
                if (ix == 0 && iy == 0) continue;
                Complex kc{double(signed_freq(ix, n)), double(signed_freq(iy, n))};
                std::size_t idx = std::size_t(iy) * n + ix;
                Complex rho_hat = work[idx];
                phi_hat[idx] = rho_hat / (Complex{0.0, M_PI} * kc);
                phi_zb_hat[idx] = rho_hat;
                work[idx] = rho_hat * std::conj(kc) / kc;  // hat(phi_z)
            }
        }
        work[0] = Complex{0, 0};
        std::vector<Complex> phi_z_new = work;
        fft2_inplace(phi_z_new, n, true);
        for (auto& c : phi_z_new) c *= double(sz);

        // residual sup |B + phi_zb - mu (A + phi_z)| with the updated fields
        std::vector<Complex> phi_zb = phi_zb_hat;
        phi_zb[0] = Complex{0, 0};
        fft2_inplace(phi_zb, n, true);
        for (auto& c : phi_zb) c *= double(sz);
        double res = 0.0;
        for (std::size_t i = 0; i < sz; ++i) {
            // w_zb - mu w_z with the updated fields; phi_zb excludes the mean
            Complex r = (B + phi_zb[i]) - mu.mu[i] * (A + phi_z_new[i]);
            res = std::max(res, std::abs(r));
        }
        phi_z.swap(phi_z_new);
        out.phi_hat = std::move(phi_hat);
        out.iterations = it + 1;
        out.residual = res;
        if (res < params.tol) {
            out.A = A;
            out.B = B;
            return out;
        }
        if (res < best * 0.999) {
            best = res;
            stall = 0;
        } else if (++stall > 25) {
            throw Error(ErrorCode::NoConvergence,
                        "Beltrami residual stagnated at " + std::to_string(res) + " after " +
                            std::to_string(it + 1) + " iterations");
        }
    }
    throw Error(ErrorCode::NoConvergence,
                "Beltrami iteration cap, residual " + std::to_string(out.residual));
}

double finite_difference_residual(const BeltramiGrid& mu, const PeriodicQcMap& w) {
    const int n = w.n;
    // sample w on the grid (phi via inverse FFT of phi_hat)
    std::vector<Complex> phi = w.phi_hat;
    fft2_inplace(phi, n, true);
    for (auto& c : phi) c *= double(std::size_t(n) * n);

    auto wrap = [&](int i) { return (i % n + n) % n; };
    // lift differences: w(z + 1/n e_x) - w(z) includes the affine parts
    auto lifted = [&](int ix, int iy) {
        Complex z{double(ix) / n, double(iy) / n};
        return w.A * z + w.B * std::conj(z) + phi[std::size_t(wrap(iy)) * n + wrap(ix)];
    };
    double h = 1.0 / n;
    double worst = 0.0;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            // 4th order central differences in x and y
            Complex dx = (-lifted(ix + 2, iy) + 8.0 * lifted(ix + 1, iy) -
                          8.0 * lifted(ix - 1, iy) + lifted(ix - 2, iy)) /
                         (12.0 * h);
            Complex dy = (-lifted(ix, iy + 2) + 8.0 * lifted(ix, iy + 1) -
                          8.0 * lifted(ix, iy - 1) + lifted(ix, iy - 2)) /
                         (12.0 * h);
            Complex wz = 0.5 * (dx - Complex{0, 1} * dy);
            Complex wzb = 0.5 * (dx + Complex{0, 1} * dy);
            worst = std::max(worst,
                             std::abs(wzb - mu.mu[std::size_t(iy) * n + ix] * wz));
        }
    }
    return worst;
}

LatticeParam lattice_parameter(const PeriodicQcMap& w) {
    Complex tau = w.period_i() / w.period_1();
    if (tau.imag() < 1e-6) throw Error(ErrorCode::DegenerateLattice, "Im tau below 1e-6");
    return {tau};
}

Complex mu_of_tau(Complex tau) {
    // Beltrami coefficient of the metric |dz + mu dzbar| in the class of the
    // structure's representative. Solving it straightens the structure; the
    // solved lattice parameter is the mirror representative -conj(tau)
    // (the boundary identification of the barycentre convention reverses
    // orientation), which the integer identification absorbs.
    conformal::ConformalStructureTau s;
    s.tau = tau;
    Mat2 q = s.representative();
    double e = q.a, fq = q.b, gq = q.d;
    double root = std::sqrt(std::max(0.0, e * gq - fq * fq));
    return Complex{e - gq, 2.0 * fq} / (e + gq + 2.0 * root);
}

namespace {

// lattice-reduce z into the fundamental cell of L(p1, pt) around 0
Complex lattice_reduce(Complex z, Complex p1, Complex pt) {
    z -= std::round(z.imag() / pt.imag()) * pt;
    z -= std::round(z.real() / p1.real()) * p1;
    return z;
}

struct CellModel {
    Complex a, b;
    Complex tau;
    double defect = 0.0;
    double beltrami_residual = 0.0;
    bool ok = false;
    std::string error;
};

}  // namespace

AffineModelReport extract_affine_model(const FibredSystem& f,
                                       const projective::TrichotomyReport& report,
                                       const AffineModelParams& params) {
    if (f.fibre_kind() != fibred::FibreKind::Torus)
        throw Error(ErrorCode::ConfigInvalid, "affine model extraction needs a torus fibre");
    if (report.verdict != projective::Verdict::ConformalStructure)
        throw Error(ErrorCode::NotConformalVerdict,
                    std::string("verdict is ") + projective::verdict_name(report.verdict));
    if (!report.structure_field)
        throw Error(ErrorCode::NotConformalVerdict, "report carries no structure field");
    const auto& field = *report.structure_field;
    const int bn = field.base_n, fn = field.fibre_n;

    AffineModelReport rep;
    rep.base_n = bn;
    rep.a_cells.assign(std::size_t(bn) * bn, Complex{1, 0});
    rep.b_cells.assign(std::size_t(bn) * bn, Complex{0, 0});
    rep.w_model.assign(std::size_t(bn) * bn, Vec2{});

    // Constancy projection: the lattice parameter of an invariant structure
    // field is constant (modular discreteness), so the uniformising map is
    // built from the field mean. Per-cell variation is a sampling artefact
    // and stays visible in the field's oscillation diagnostic.
    Complex tau_mean{0.0, 0.0};
    int n_valid = 0;
    for (int cell = 0; cell < int(field.tau.size()); ++cell) {
        if (!field.valid[cell]) continue;
        tau_mean += field.tau[cell];
        ++n_valid;
    }
    if (n_valid == 0) throw Error(ErrorCode::NotConformalVerdict, "structure field is empty");
    tau_mean /= double(n_valid);

    BeltramiSolveParams sp;
    sp.tol = params.beltrami_tol;
    auto grid = BeltramiGrid::constant(params.grid_n, mu_of_tau(tau_mean));
    auto w_global = solve_beltrami_periodic(grid, sp);

    std::vector<CellModel> cells(std::size_t(bn) * bn);
    parallel_for(bn * bn, params.workers, [&](int cellb) {
        int bi = cellb / bn, bj = cellb % bn;
        CellModel& cm = cells[cellb];
        try {
            const auto& w = w_global;
            const auto& w_img = w_global;
            cm.beltrami_residual = w.residual;
            cm.tau = lattice_parameter(w).tau;
            cm.ok = true;

            base::ToralPoint xc{(bi + 0.5) / bn, (bj + 0.5) / bn};

            Complex p1s = w.period_1(), pts = w.period_i();
            Complex p1 = w_img.period_1(), pt = w_img.period_i();

            // affine fit over the fit grid
            const int m = params.fit_grid;
            std::vector<Complex> us(std::size_t(m) * m), vs(std::size_t(m) * m);
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < m; ++j) {
                    Vec2 v{(i + 0.5) / m, (j + 0.5) / m};
                    Complex u = w.value(Complex{v.x, v.y});
                    Vec2 img = std::get<Vec2>(f.fibre_map(xc, fibred::FibrePoint{v}));
                    Complex ui = w_img.value(Complex{img.x, img.y});
                    us[std::size_t(i) * m + j] = u;
                    vs[std::size_t(i) * m + j] = ui;
                }
            }
            // slope from grid-neighbour differences, lattice-reduced in the
            // source and image lattices respectively
            Complex num{0, 0};
            double den = 0.0;
            auto pair_term = [&](std::size_t p, std::size_t q) {
                Complex du = lattice_reduce(us[p] - us[q], p1s, pts);
                Complex dv = lattice_reduce(vs[p] - vs[q], p1, pt);
                num += dv * std::conj(du);
                den += std::norm(du);
            };
            for (int i = 0; i < m; ++i)
                for (int j = 0; j + 1 < m; ++j) {
                    pair_term(std::size_t(i) * m + j + 1, std::size_t(i) * m + j);
                    pair_term(std::size_t(j + 1) * m + i, std::size_t(j) * m + i);
                }
            Complex a = num / den;
            // translation: consistent representative near the first sample
            Complex b0 = vs[0] - a * us[0];
            Complex bsum{0, 0};
            for (std::size_t p = 0; p < us.size(); ++p) {
                Complex bp = vs[p] - a * us[p];
                bsum += b0 + lattice_reduce(bp - b0, p1, pt);
            }
            Complex b = lattice_reduce(bsum / double(us.size()), p1, pt);

            // defect over the finer grid
            const int dg = params.defect_grid;
            double defect = 0.0;
            for (int i = 0; i < dg; ++i) {
                for (int j = 0; j < dg; ++j) {
                    Vec2 v{(i + 0.5) / dg, (j + 0.5) / dg};
                    Complex u = w.value(Complex{v.x, v.y});
                    Vec2 img = std::get<Vec2>(f.fibre_map(xc, fibred::FibrePoint{v}));
                    Complex ui = w_img.value(Complex{img.x, img.y});
                    defect = std::max(defect,
                                      std::abs(lattice_reduce(ui - (a * u + b), p1, pt)));
                }
            }
            cm.a = a;
            cm.b = b;
            cm.defect = defect;
        } catch (const Error& e) {
            cm.ok = false;
            cm.error = e.what();
        }
    });

    for (const auto& cm : cells)
        if (!cm.ok) throw Error(ErrorCode::NoConvergence, "cell solve failed: " + cm.error);

    // aggregate
    Complex tau0 = cells[0].tau;
    double tau_osc = 0.0, a_osc = 0.0, max_dev = 0.0, max_defect = 0.0, max_res = 0.0;
    for (const auto& cm : cells) {
        tau_osc = std::max(tau_osc, conformal::hyperbolic_distance(cm.tau, tau0));
        a_osc = std::max(a_osc, std::abs(cm.a - cells[0].a));
        max_dev = std::max(max_dev, std::abs(std::abs(cm.a) - 1.0));
        max_defect = std::max(max_defect, cm.defect);
        max_res = std::max(max_res, cm.beltrami_residual);
    }
    rep.tau = tau0;
    rep.tau_oscillation = tau_osc;
    rep.a_oscillation = a_osc;
    rep.max_abs_a_deviation = max_dev;
    rep.max_conjugacy_defect = max_defect;
    rep.max_beltrami_residual = max_res;
    if (a_osc > params.a_const_gate)
        throw Error(ErrorCode::NonConstantA,
                    "a_x oscillation " + std::to_string(a_osc) + " beyond gate");

    // integer identification through the marking 1 -> 1, i -> tau
    Complex tau = tau0;
    Mat2 lambda{1.0, tau.real(), 0.0, tau.imag()};
    Mat2 lrec = lambda.inverse() * Mat2::complex_mul(cells[0].a) * lambda;
    auto nearint = [&](double v) { return std::llround(v); };
    double int_err = std::max(std::max(std::abs(lrec.a - nearint(lrec.a)),
                                       std::abs(lrec.b - nearint(lrec.b))),
                              std::max(std::abs(lrec.c - nearint(lrec.c)),
                                       std::abs(lrec.d - nearint(lrec.d))));
    if (int_err > params.integer_gate)
        throw Error(ErrorCode::NotInteger,
                    "recovered linear part is " + std::to_string(int_err) + " from integers");
    rep.L = {{{nearint(lrec.a), nearint(lrec.b)}, {nearint(lrec.c), nearint(lrec.d)}}};
    rep.trace = rep.L[0][0] + rep.L[1][1];
    rep.order = fibred::elliptic_order(rep.L);

    Mat2 lambda_inv = lambda.inverse();
    for (std::size_t c = 0; c < cells.size(); ++c) {
        rep.a_cells[c] = cells[c].a;
        rep.b_cells[c] = cells[c].b;
        Vec2 wv = lambda_inv * Vec2{cells[c].b.real(), cells[c].b.imag()};
        rep.w_model[c] = Vec2{mod1(wv.x), mod1(wv.y)};
    }
    if (max_defect > params.defect_gate)
        throw Error(ErrorCode::FitDefectExceeded,
                    "conjugacy defect " + std::to_string(max_defect) + " beyond gate");
    return rep;
}

// ---- sphere model ----------------------------------------------------------

namespace {

// smallest-eigenvector of a 4x4 complex Hermitian PSD matrix by inverse
// iteration with partial-pivot solves
std::array<Complex, 4> smallest_eigenvector(std::array<std::array<Complex, 4>, 4> m) {
    double tr = 0.0;
    for (int i = 0; i < 4; ++i) tr += m[i][i].real();
    for (int i = 0; i < 4; ++i) m[i][i] += 1e-12 * tr + 1e-300;

    auto solve = [&](std::array<Complex, 4> rhs) {
        auto a = m;
        std::array<int, 4> piv{0, 1, 2, 3};
        for (int col = 0; col < 4; ++col) {
            int best = col;
            for (int r = col + 1; r < 4; ++r)
                if (std::abs(a[r][col]) > std::abs(a[best][col])) best = r;
            std::swap(a[col], a[best]);
            std::swap(rhs[col], rhs[best]);
            (void)piv;
            for (int r = col + 1; r < 4; ++r) {
                Complex fentry = a[r][col] / a[col][col];
                for (int c2 = col; c2 < 4; ++c2) a[r][c2] -= fentry * a[col][c2];
                rhs[r] -= fentry * rhs[col];
            }
        }
        std::array<Complex, 4> x{};
        for (int r = 3; r >= 0; --r) {
            Complex s = rhs[r];
            for (int c2 = r + 1; c2 < 4; ++c2) s -= a[r][c2] * x[c2];
            x[r] = s / a[r][r];
        }
        return x;
    };

    std::array<Complex, 4> v{Complex{1, 0}, Complex{0.5, 0.1}, Complex{-0.3, 0.2},
                             Complex{0.2, -0.4}};
    for (int it = 0; it < 30; ++it) {
        v = solve(v);
        double nrm = 0.0;
        for (const auto& c : v) nrm += std::norm(c);
        nrm = std::sqrt(nrm);
        for (auto& c : v) c /= nrm;
    }
    return v;
}

MoebiusCoefficients fit_moebius(const std::vector<Complex>& zs, const std::vector<Complex>& ws) {
    std::array<std::array<Complex, 4>, 4> m{};
    for (std::size_t j = 0; j < zs.size(); ++j) {
        // residual row (z, 1, -w z, -w) . (a, b, c, d)
        std::array<Complex, 4> r{zs[j], Complex{1, 0}, -ws[j] * zs[j], -ws[j]};
        for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q) m[p][q] += std::conj(r[p]) * r[q];
    }
    auto v = smallest_eigenvector(m);
    MoebiusCoefficients out{v[0], v[1], v[2], v[3]};
    Complex det = out.a * out.d - out.b * out.c;
    if (std::abs(det) < 1e-14)
        throw Error(ErrorCode::SingularMatrix, "degenerate Moebius fit");
    Complex s = 1.0 / std::sqrt(det);
    out.a *= s;
    out.b *= s;
    out.c *= s;
    out.d *= s;
    return out;
}

double chordal_dist(const fibred::SpherePoint& p, const fibred::SpherePoint& q) {
    return std::sqrt((p.X - q.X) * (p.X - q.X) + (p.Y - q.Y) * (p.Y - q.Y) +
                     (p.Z - q.Z) * (p.Z - q.Z));
}

}  // namespace

MoebiusCoefficients normalize_psl2c(const MoebiusCoefficients& m) {
    Complex det = m.a * m.d - m.b * m.c;
    Complex s = 1.0 / std::sqrt(det);
    MoebiusCoefficients out{m.a * s, m.b * s, m.c * s, m.d * s};
    const Complex* coeffs[4] = {&out.a, &out.b, &out.c, &out.d};
    int big = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(*coeffs[i]) > std::abs(*coeffs[big])) big = i;
    Complex phase = *coeffs[big] / std::abs(*coeffs[big]);
    Complex corr = std::conj(phase);
    out.a *= corr;
    out.b *= corr;
    out.c *= corr;
    out.d *= corr;
    return out;
}

MoebiusModelReport extract_moebius_model(const FibredSystem& f,
                                         const projective::TrichotomyReport& report,
                                         const MoebiusModelParams& params) {
    if (f.fibre_kind() != fibred::FibreKind::Sphere)
        throw Error(ErrorCode::ConfigInvalid, "Moebius model extraction needs a sphere fibre");
    if (report.verdict != projective::Verdict::ConformalStructure)
        throw Error(ErrorCode::NotConformalVerdict,
                    std::string("verdict is ") + projective::verdict_name(report.verdict));
    if (!report.structure_field)
        throw Error(ErrorCode::NotConformalVerdict, "report carries no structure field");
    const auto& field = *report.structure_field;
    const int bn = field.base_n, fn = field.fibre_n;

    // cellwise linear normalizer from the structure field: sqrt of the SPD
    // representative straightens the structure in the chart plane
    auto normalizer = [&](int bi, int bj, const fibred::SpherePoint& v) {
        double lon = mod1(std::atan2(v.Y, v.X) / (2.0 * M_PI));
        double lat = std::clamp((v.Z + 1.0) / 2.0, 0.0, 1.0);
        int fi = std::min(fn - 1, int(lon * fn));
        int fj = std::min(fn - 1, int(lat * fn));
        int cell = ((bi * bn + bj) * fn + fi) * fn + fj;
        conformal::ConformalStructureTau s;
        s.tau = field.valid[cell] ? field.tau[cell] : field.mean_tau;
        Mat2 q = s.representative();
        // symmetric square root
        double sdet = std::sqrt(q.det());
        double t = std::sqrt(q.a + q.d + 2.0 * sdet);
        return (q + Mat2{sdet, 0, 0, sdet}) * (1.0 / t);
    };

    MoebiusModelReport rep;
    rep.base_n = bn;
    rep.cells.assign(std::size_t(bn) * bn, MoebiusCoefficients{});
    std::vector<double> defects(std::size_t(bn) * bn, 0.0), naive(std::size_t(bn) * bn, 0.0);
    std::vector<std::uint8_t> used_structure(std::size_t(bn) * bn, 0);
    std::vector<std::string> errors(std::size_t(bn) * bn);

    parallel_for(bn * bn, params.workers, [&](int cellb) {
        int bi = cellb / bn, bj = cellb % bn;
        base::ToralPoint xc{(bi + 0.5) / bn, (bj + 0.5) / bn};
        base::ToralPoint gx = base::iterate(f.base(), xc, 1);
        int gbi = std::min(bn - 1, int(gx.x1 * bn)), gbj = std::min(bn - 1, int(gx.x2 * bn));
        try {
            std::vector<Complex> zs, ws, zs_n, ws_n;
            for (int band = 0; band < params.sample_band; ++band) {
                double Z = -0.75 + 1.5 * (band + 0.5) / params.sample_band;
                double r = std::sqrt(1.0 - Z * Z);
                for (int l = 0; l < params.sample_lon; ++l) {
                    double phi = 2.0 * M_PI * (l + 0.5) / params.sample_lon;
                    fibred::SpherePoint v{r * std::cos(phi), r * std::sin(phi), Z};
                    auto img = std::get<fibred::SpherePoint>(f.fibre_map(xc, v));
                    auto z = fibred::stereographic(v);
                    auto wimg = fibred::stereographic(img);
                    if (z.infinite || wimg.infinite) continue;
                    if (std::abs(z.z) > 8.0 || std::abs(wimg.z) > 8.0) continue;
                    zs.push_back(z.z);
                    ws.push_back(wimg.z);
                    Mat2 np = normalizer(bi, bj, v);
                    Mat2 nq = normalizer(gbi, gbj, img);
                    Vec2 zn = np * Vec2{z.z.real(), z.z.imag()};
                    Vec2 wn = nq * Vec2{wimg.z.real(), wimg.z.imag()};
                    zs_n.push_back(Complex{zn.x, zn.y});
                    ws_n.push_back(Complex{wn.x, wn.y});
                }
            }
            if (zs.size() < 12)
                throw Error(ErrorCode::ConfigInvalid, "fewer than 12 usable samples");
            auto fit_naive = fit_moebius(zs, ws);
            auto fit_struct = fit_moebius(zs_n, ws_n);

            // defects, chordal metric on a test grid
            double dn = 0.0, ds = 0.0;
            for (int band = 0; band < params.defect_grid; ++band) {
                double Z = -0.85 + 1.7 * (band + 0.5) / params.defect_grid;
                double r = std::sqrt(1.0 - Z * Z);
                for (int l = 0; l < params.defect_grid; ++l) {
                    double phi = 2.0 * M_PI * (l + 0.5) / params.defect_grid;
                    fibred::SpherePoint v{r * std::cos(phi), r * std::sin(phi), Z};
                    auto img = std::get<fibred::SpherePoint>(f.fibre_map(xc, v));
                    auto z = fibred::stereographic(v);
                    if (z.infinite) continue;
                    // naive prediction in the plain chart
                    Complex pred_n =
                        (fit_naive.a * z.z + fit_naive.b) / (fit_naive.c * z.z + fit_naive.d);
                    dn = std::max(dn, chordal_dist(img, fibred::stereographic_inverse(
                                                            {pred_n, false})));
                    // structure-normalised prediction mapped back
                    Mat2 np = normalizer(bi, bj, v);
                    Vec2 zn = np * Vec2{z.z.real(), z.z.imag()};
                    Complex zc{zn.x, zn.y};
                    Complex pc =
                        (fit_struct.a * zc + fit_struct.b) / (fit_struct.c * zc + fit_struct.d);
                    Mat2 nq = normalizer(gbi, gbj, img);
                    Vec2 back = nq.inverse() * Vec2{pc.real(), pc.imag()};
                    ds = std::max(ds, chordal_dist(img, fibred::stereographic_inverse(
                                                            {Complex{back.x, back.y}, false})));
                }
            }
            naive[cellb] = dn;
            defects[cellb] = ds;
            // the empirical structure field carries sampling noise; keep
            // whichever conjugation certifies the smaller defect
            if (ds < dn) {
                rep.cells[cellb] = fit_struct;
                used_structure[cellb] = 1;
            } else {
                rep.cells[cellb] = fit_naive;
            }
        } catch (const Error& e) {
            errors[cellb] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw Error(ErrorCode::NoConvergence, "cell fit failed: " + e);
    for (std::size_t c = 0; c < defects.size(); ++c) {
        rep.structure_max_fit_defect = std::max(rep.structure_max_fit_defect, defects[c]);
        rep.naive_max_fit_defect = std::max(rep.naive_max_fit_defect, naive[c]);
        rep.max_fit_defect = std::max(rep.max_fit_defect, std::min(defects[c], naive[c]));
        rep.cells_structure_selected += used_structure[c];
    }
    if (params.enforce_defect_gate && rep.max_fit_defect > params.defect_gate)
        throw Error(ErrorCode::FitDefectExceeded,
                    "fit defect " + std::to_string(rep.max_fit_defect));
    return rep;
}

}  // namespace phlab::uniformize
