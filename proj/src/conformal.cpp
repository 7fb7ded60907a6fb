#include "phlab/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "phlab/errors.hpp"
#include "phlab/parallel.hpp"

namespace phlab::conformal {

MoebiusReal MoebiusReal::from_matrix(const Mat2& m) {
    double det = m.det();
    if (det <= 0.0) throw Error(ErrorCode::ConfigInvalid, "PSL(2,R) needs det > 0");
    double s = 1.0 / std::sqrt(det);
    return {m.a * s, m.b * s, m.c * s, m.d * s};
}

double proj_to_circle(double theta) { return mod_2pi(-2.0 * theta); }

double circle_to_proj(double angle) { return mod_pi(-angle / 2.0); }

Complex half_plane_to_disc(Complex z) { return (z - Complex{0, 1}) / (z + Complex{0, 1}); }

Complex disc_to_half_plane(Complex w) { return Complex{0, 1} * (1.0 + w) / (1.0 - w); }

double hyperbolic_distance(Complex t1, Complex t2) {
    double y1 = t1.imag(), y2 = t2.imag();
    if (y1 <= 0.0 || y2 <= 0.0) return 1e300;
    return 2.0 * std::asinh(std::abs(t1 - t2) / (2.0 * std::sqrt(y1 * y2)));
}

double CircleMeasure::total() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.mass;
    return s;
}

double CircleMeasure::max_atom_mass() const {
    // pointwise: coincident atoms merge, distinct ones do not
    double best = 0.0;
    for (const auto& a : atoms) {
        double m = 0.0;
        for (const auto& b : atoms)
            if (circle_dist(a.angle, b.angle) <= 1e-9) m += b.mass;
        best = std::max(best, m);
    }
    return best;
}

CircleMeasure circle_measure_from_conditional(const projective::FibreConditional& c) {
    CircleMeasure m;
    double total = c.total();
    if (total <= 0.0) throw Error(ErrorCode::ConfigInvalid, "empty conditional");
    const int n = c.n_bins();
    m.atoms.reserve(n);
    for (int b = 0; b < n; ++b) {
        if (c.mass[b] == 0.0) continue;
        double theta = (b + 0.5) * M_PI / n;
        m.atoms.push_back({proj_to_circle(theta), c.mass[b] / total});
    }
    return m;
}

Complex disc_field(const CircleMeasure& m, Complex w) {
    Complex acc{0.0, 0.0};
    for (const auto& a : m.atoms) {
        Complex zeta{std::cos(a.angle), std::sin(a.angle)};
        acc += a.mass * (zeta - w) / (1.0 - std::conj(w) * zeta);
    }
    return acc;
}

namespace {

// Wirtinger derivatives of the disc field.
void disc_field_jacobian(const CircleMeasure& m, Complex w, Complex& dw, Complex& dwb) {
    dw = Complex{0.0, 0.0};
    dwb = Complex{0.0, 0.0};
    for (const auto& a : m.atoms) {
        Complex zeta{std::cos(a.angle), std::sin(a.angle)};
        Complex den = 1.0 - std::conj(w) * zeta;
        dw += a.mass * (-1.0) / den;
        dwb += a.mass * (zeta - w) * zeta / (den * den);
    }
}

}  // namespace

BarycentreResult barycentre(const CircleMeasure& m, double tol, double heavy_slack) {
    if (std::abs(m.total() - 1.0) > 1e-6)
        throw Error(ErrorCode::ConfigInvalid, "circle measure is not a probability");
    if (m.max_atom_mass() >= 0.5 - heavy_slack)
        throw Error(ErrorCode::HeavyAtom, "atom of mass >= 1/2 - slack");

    Complex w{0.0, 0.0};
    for (const auto& a : m.atoms) w += a.mass * Complex{std::cos(a.angle), std::sin(a.angle)};
    if (std::abs(w) > 0.9) w *= 0.9 / std::abs(w);

    BarycentreResult out;
    Complex xi = disc_field(m, w);
    for (int it = 0; it < 200; ++it) {
        out.iterations = it;
        double norm = std::abs(xi);
        if (norm < tol) {
            out.w = w;
            out.field_norm = norm;
            return out;
        }
        Complex dw, dwb;
        disc_field_jacobian(m, w, dw, dwb);
        Mat2 jac{(dw + dwb).real(), -(dw - dwb).imag(), (dw + dwb).imag(), (dw - dwb).real()};
        Vec2 delta;
        bool solved = false;
        if (std::abs(jac.det()) > 1e-14) {
            delta = jac.inverse() * Vec2{xi.real(), xi.imag()};
            solved = true;
        }
        bool improved = false;
        if (solved) {
            double step = 1.0;
            for (int half = 0; half < 12; ++half) {
                Complex trial = w - step * Complex{delta.x, delta.y};
                if (std::abs(trial) < 1.0 - 1e-12) {
                    Complex txi = disc_field(m, trial);
                    if (std::abs(txi) < norm) {
                        w = trial;
                        xi = txi;
                        improved = true;
                        break;
                    }
                }
                step *= 0.5;
            }
        }
        if (!improved) {
            // compass-search fallback on |xi|
            double radius = std::max(1e-14, norm * 0.5);
            bool moved = false;
            for (int shrink = 0; shrink < 40 && !moved; ++shrink) {
                for (int k = 0; k < 8; ++k) {
                    double ang = k * M_PI / 4.0;
                    Complex trial = w + radius * Complex{std::cos(ang), std::sin(ang)};
                    if (std::abs(trial) >= 1.0 - 1e-12) continue;
                    Complex txi = disc_field(m, trial);
                    if (std::abs(txi) < norm) {
                        w = trial;
                        xi = txi;
                        moved = true;
                        break;
                    }
                }
                radius *= 0.5;
            }
            if (!moved)
                throw Error(ErrorCode::NoConvergence, "barycentre search stagnated");
        }
    }
    throw Error(ErrorCode::NoConvergence, "barycentre iteration limit");
}

Mat2 ConformalStructureTau::representative() const {
    double im = tau.imag();
    if (im <= 0.0) throw Error(ErrorCode::InternalError, "tau not in the upper half-plane");
    double re = tau.real();
    return Mat2{1.0 / im, -re / im, -re / im, (re * re + im * im) / im};
}

ConformalStructureTau ConformalStructureTau::from_representative(const Mat2& q) {
    double det = q.det();
    if (det <= 0.0 || q.a <= 0.0)
        throw Error(ErrorCode::InternalError, "representative must be SPD");
    double s = 1.0 / std::sqrt(det);
    double e = q.a * s, fcoef = q.b * s;
    ConformalStructureTau out;
    out.tau = Complex{-fcoef / e, 1.0 / e};
    return out;
}

ConformalStructureTau pushforward_structure(const ConformalStructureTau& s, const Mat2& A) {
    Mat2 ainv = A.inverse();
    Mat2 q = ainv.transpose() * s.representative() * ainv;
    // symmetrise against roundoff
    double off = 0.5 * (q.b + q.c);
    q.b = off;
    q.c = off;
    return ConformalStructureTau::from_representative(q);
}

ConformalStructureTau structure_from_measure(const projective::FibreConditional& c, double tol,
                                             double heavy_slack) {
    // histogram conditionals smear atoms across neighbouring bins, so the
    // windowed detector guards the barycentre precondition
    if (!projective::detect_atoms(c, 0.5, heavy_slack).empty())
        throw Error(ErrorCode::HeavyAtom, "conditional carries an atom of mass >= 1/2 - slack");
    CircleMeasure m = circle_measure_from_conditional(c);
    BarycentreResult b = barycentre(m, tol, heavy_slack);
    ConformalStructureTau out;
    out.tau = disc_to_half_plane(b.w);
    return out;
}

ConformalStructureTau invariant_structure_of(const fibred::EllipticMatrix& L) {
    if (L.order <= 2)
        throw Error(ErrorCode::TrivialAction, "orders 1 and 2 preserve every structure");
    double a = double(L.entries[0][0]), b = double(L.entries[0][1]);
    double c = double(L.entries[1][0]), d = double(L.entries[1][1]);
    (void)b;
    // fixed point of (a z + b)/(c z + d): c z^2 + (d - a) z - b = 0
    double tr = a + d;
    double disc = 4.0 - tr * tr;  // = -(tr^2 - 4) > 0 for elliptic
    if (c == 0.0) throw Error(ErrorCode::InternalError, "elliptic with c = 0 and order >= 3");
    ConformalStructureTau out;
    double im = std::sqrt(disc) / (2.0 * std::abs(c));
    double re = (a - d) / (2.0 * c);
    out.tau = Complex{re, im};
    return out;
}

BarycentreField barycentre_field(const projective::DisintegrationField& field,
                                 const BarycentreFieldParams& params) {
    BarycentreField out;
    out.base_n = field.base_n();
    out.fibre_n = field.fibre_n();
    int n = field.n_cells();
    out.tau.assign(n, Complex{0.0, 1.0});
    out.valid.assign(n, 0);

    std::vector<std::string> errors(n);
    parallel_for(n, params.workers, [&](int cell) {
        if (field.sparse(cell, params.min_samples)) return;
        try {
            auto s = structure_from_measure(field.conditional(cell), params.tol,
                                            params.heavy_slack);
            out.tau[cell] = s.tau;
            out.valid[cell] = 1;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::HeavyAtom) errors[cell] = e.what();
        }
    });
    for (int cell = 0; cell < n; ++cell)
        if (!errors[cell].empty())
            throw Error(ErrorCode::HeavyAtom,
                        "cell " + std::to_string(cell) + ": " + errors[cell]);

    // oscillation across neighbouring cells (base torus wraps; fibre wraps in
    // its first coordinate, which is periodic for both fibre kinds)
    auto idx = [&](int bi, int bj, int fi, int fj) {
        return ((bi * out.base_n + bj) * out.fibre_n + fi) * out.fibre_n + fj;
    };
    double osc = 0.0;
    Complex mean{0.0, 0.0};
    int count = 0;
    for (int bi = 0; bi < out.base_n; ++bi)
        for (int bj = 0; bj < out.base_n; ++bj)
            for (int fi = 0; fi < out.fibre_n; ++fi)
                for (int fj = 0; fj < out.fibre_n; ++fj) {
                    int cell = idx(bi, bj, fi, fj);
                    if (!out.valid[cell]) continue;
                    mean += out.tau[cell];
                    ++count;
                    int nb[4] = {idx((bi + 1) % out.base_n, bj, fi, fj),
                                 idx(bi, (bj + 1) % out.base_n, fi, fj),
                                 idx(bi, bj, (fi + 1) % out.fibre_n, fj), -1};
                    if (fj + 1 < out.fibre_n) nb[3] = idx(bi, bj, fi, fj + 1);
                    for (int k = 0; k < 4; ++k) {
                        if (nb[k] < 0 || !out.valid[nb[k]]) continue;
                        osc = std::max(osc, hyperbolic_distance(out.tau[cell], out.tau[nb[k]]));
                    }
                }
    out.oscillation = osc;
    out.n_valid = count;
    if (count > 0) out.mean_tau = mean / double(count);
    return out;
}

}  // namespace phlab::conformal
