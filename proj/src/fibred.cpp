#include "phlab/fibred.hpp"

#include <cmath>

#include "phlab/errors.hpp"

namespace phlab::fibred {

namespace {
using IMat = std::array<std::array<long long, 2>, 2>;

IMat imul(const IMat& p, const IMat& q) {
    return {{{p[0][0] * q[0][0] + p[0][1] * q[1][0], p[0][0] * q[0][1] + p[0][1] * q[1][1]},
             {p[1][0] * q[0][0] + p[1][1] * q[1][0], p[1][0] * q[0][1] + p[1][1] * q[1][1]}}};
}
bool is_identity(const IMat& m) {
    return m[0][0] == 1 && m[0][1] == 0 && m[1][0] == 0 && m[1][1] == 1;
}
}  // namespace

int elliptic_order(const IMat& m) {
    long long det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if (det != 1) throw Error(ErrorCode::NotElliptic, "det must be 1");
    long long tr = m[0][0] + m[1][1];
    int order;
    // trace = 2 cos(theta); integrality forces cos(theta) in {-1,-1/2,0,1/2,1}
    switch (tr) {
        case 2:
            if (!is_identity(m)) throw Error(ErrorCode::NotElliptic, "parabolic (trace 2)");
            order = 1;
            break;
        case -2: {
            IMat neg{{{-m[0][0], -m[0][1]}, {-m[1][0], -m[1][1]}}};
            if (!is_identity(neg)) throw Error(ErrorCode::NotElliptic, "parabolic (trace -2)");
            order = 2;
            break;
        }
        case -1: order = 3; break;
        case 0: order = 4; break;
        case 1: order = 6; break;
        default: throw Error(ErrorCode::NotElliptic, "hyperbolic (|trace| > 2)");
    }
    IMat p{{{1, 0}, {0, 1}}};
    for (int i = 0; i < order; ++i) p = imul(p, m);
    if (!is_identity(p)) throw Error(ErrorCode::InternalError, "order check failed");
    return order;
}

EllipticMatrix make_elliptic(const IMat& m) {
    EllipticMatrix e;
    e.entries = m;
    e.order = elliptic_order(m);
    return e;
}

// ---- sphere geometry -------------------------------------------------------

ExtComplex stereographic(const SpherePoint& p) {
    if (p.Z > 1.0 - 1e-14) return {Complex{0.0, 0.0}, true};
    return {Complex{p.X, p.Y} / (1.0 - p.Z), false};
}

SpherePoint stereographic_inverse(const ExtComplex& z) {
    if (z.infinite) return {0.0, 0.0, 1.0};
    double n2 = std::norm(z.z);
    double d = 1.0 + n2;
    return {2.0 * z.z.real() / d, 2.0 * z.z.imag() / d, (n2 - 1.0) / d};
}

double jacobian_P_inverse(const Complex& z) {
    double t = 1.0 + std::norm(z);
    return 4.0 / (t * t);
}

Homog to_homog(const SpherePoint& p) {
    // Two algebraically equal forms; pick the well-conditioned one.
    if (p.Z <= 0.0) return {Complex{p.X, p.Y}, Complex{1.0 - p.Z, 0.0}};
    return {Complex{1.0 + p.Z, 0.0}, Complex{p.X, -p.Y}};
}

SpherePoint from_homog(const Homog& h) {
    double n1 = std::norm(h.h1), n2 = std::norm(h.h2);
    double d = n1 + n2;
    Complex xy = 2.0 * h.h1 * std::conj(h.h2) / d;
    return {xy.real(), xy.imag(), (n1 - n2) / d};
}

double fibre_dist(const FibrePoint& a, const FibrePoint& b) {
    if (std::holds_alternative<Vec2>(a)) {
        return torus_dist(std::get<Vec2>(a), std::get<Vec2>(b));
    }
    const auto& p = std::get<SpherePoint>(a);
    const auto& q = std::get<SpherePoint>(b);
    return std::sqrt((p.X - q.X) * (p.X - q.X) + (p.Y - q.Y) * (p.Y - q.Y) +
                     (p.Z - q.Z) * (p.Z - q.Z));
}

// ---- sphere primitives -----------------------------------------------------

namespace {

struct MoebPrim {
    Complex a{1, 0}, b{0, 0}, c{0, 0}, d{1, 0};  // det 1
};

struct TwistPrim {
    const TwistProfile* psi = nullptr;
    double eps = 0.0;
};

struct SpherePrim {
    bool twist = false;
    MoebPrim m;
    TwistPrim t;
};

Homog apply_prim(const SpherePrim& p, const Homog& h) {
    if (!p.twist) {
        return {p.m.a * h.h1 + p.m.b * h.h2, p.m.c * h.h1 + p.m.d * h.h2};
    }
    double n1 = std::norm(h.h1), n2 = std::norm(h.h2);
    double Z = (n1 - n2) / (n1 + n2);
    double ang = p.t.eps * p.t.psi->eval(Z);
    return {h.h1 * Complex{std::cos(ang), std::sin(ang)}, h.h2};
}

Homog apply_prim_inverse(const SpherePrim& p, const Homog& h) {
    if (!p.twist) {
        return {p.m.d * h.h1 - p.m.b * h.h2, -p.m.c * h.h1 + p.m.a * h.h2};
    }
    double n1 = std::norm(h.h1), n2 = std::norm(h.h2);
    double Z = (n1 - n2) / (n1 + n2);  // latitude is twist-invariant
    double ang = -p.t.eps * p.t.psi->eval(Z);
    return {h.h1 * Complex{std::cos(ang), std::sin(ang)}, h.h2};
}

int chart_of(const Homog& h) { return (std::norm(h.h1) > std::norm(h.h2)) ? 1 : 0; }

Complex chart_coord(const Homog& h, int chart) {
    return (chart == 0) ? h.h1 / h.h2 : h.h2 / h.h1;
}

double frame_scale(const Complex& zeta) { return 0.5 * (1.0 + std::norm(zeta)); }

Mat2 wirtinger_to_mat(const Complex& dz, const Complex& dzb) {
    return {(dz + dzb).real(), -(dz - dzb).imag(), (dz + dzb).imag(), (dz - dzb).real()};
}

// Frame-to-frame derivative of one primitive at h; also returns the image.
Mat2 prim_frame_jacobian(const SpherePrim& p, const Homog& h, Homog& image) {
    image = apply_prim(p, h);
    int cin = chart_of(h), cout = chart_of(image);
    Complex zin = chart_coord(h, cin);
    Complex zout = chart_coord(image, cout);
    double sin_ = frame_scale(zin), sout = frame_scale(zout);

    if (!p.twist) {
        // Holomorphic in every chart pairing; derivative from the 2x2 action.
        Complex a = p.m.a, b = p.m.b, c = p.m.c, d = p.m.d;
        if (cin == 1) {  // substitute z = 1/u
            std::swap(a, b);
            std::swap(c, d);
        }
        Complex deriv;
        if (cout == 0) {
            Complex den = c * zin + d;
            deriv = (cin == 0 ? Complex{1, 0} : Complex{-1, 0}) / (den * den);
        } else {
            Complex den = a * zin + b;
            deriv = (cin == 0 ? Complex{-1, 0} : Complex{1, 0}) / (den * den);
        }
        return Mat2::complex_mul(deriv) * (sin_ / sout);
    }

    // Twist: same chart in and out, unit frame factor.
    double sgn_map = (cin == 0) ? 1.0 : -1.0;    // chart-1 expression rotates by -psi
    double sgn_lat = (cin == 0) ? 1.0 : -1.0;    // geometric Z = sgn_lat * Zf(zeta)
    double n = std::norm(zin);
    double Zf = (n - 1.0) / (n + 1.0);
    double Zg = sgn_lat * Zf;
    double ang = sgn_map * p.t.eps * p.t.psi->eval(Zg);
    double dpsi = p.t.eps * p.t.psi->deriv(Zg);
    double beta = sgn_map * sgn_lat * dpsi * 2.0 / ((1.0 + n) * (1.0 + n));
    Complex rot{std::cos(ang), std::sin(ang)};
    Complex dz = rot * Complex{1.0, beta * n};
    Complex dzb = rot * Complex{0.0, beta} * zin * zin;
    return wirtinger_to_mat(dz, dzb);
}

// SU(2) element of the rotation by `angle` about the unit axis, matching the
// stereographic chart action (verified against 3x3 rotations in tests).
MoebPrim su2_rotation(const std::array<double, 3>& axis, double angle) {
    double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
    MoebPrim m;
    m.a = Complex{c, s * axis[2]};
    m.b = Complex{s * axis[1], s * axis[0]};
    m.c = Complex{-s * axis[1], s * axis[0]};
    m.d = Complex{c, -s * axis[2]};
    return m;
}

const std::array<double, 3> kYAxis{0.0, 1.0, 0.0};

MoebPrim moebius_at(const MoebiusSpec& spec, const Vec2& x) {
    MoebPrim m;
    if (spec.mode == MoebiusSpec::Mode::Rotation) {
        double n = std::hypot(std::hypot(spec.axis[0], spec.axis[1]), spec.axis[2]);
        if (n < 1e-12) throw Error(ErrorCode::ConfigInvalid, "zero rotation axis");
        std::array<double, 3> ax{spec.axis[0] / n, spec.axis[1] / n, spec.axis[2] / n};
        return su2_rotation(ax, spec.angle.eval(x));
    }
    m.a = spec.a.eval(x);
    m.b = spec.b.eval(x);
    m.c = spec.c.eval(x);
    m.d = spec.d.eval(x);
    Complex det = m.a * m.d - m.b * m.c;
    if (std::abs(det) < 1e-12)
        throw Error(ErrorCode::ConfigInvalid, "Moebius coefficients with ad - bc ~ 0");
    Complex s = 1.0 / std::sqrt(det);
    m.a *= s;
    m.b *= s;
    m.c *= s;
    m.d *= s;
    return m;
}

// Primitive chain in application order for the sphere fibre map at base x.
void sphere_chain(const FibreSpec& spec, const Vec2& x, std::vector<SpherePrim>& out) {
    out.clear();
    if (std::holds_alternative<MoebiusSpec>(spec)) {
        out.push_back({false, moebius_at(std::get<MoebiusSpec>(spec), x), {}});
        return;
    }
    const auto& pm = std::get<PerturbedMoebiusSpec>(spec);
    if (!pm.twist_z.empty())
        out.push_back({true, {}, {&pm.twist_z, pm.eps}});
    if (!pm.twist_x.empty()) {
        // conjugate a latitude twist by the rotation sending the x-axis to the z-axis
        out.push_back({false, su2_rotation(kYAxis, -M_PI / 2.0), {}});
        out.push_back({true, {}, {&pm.twist_x, pm.eps}});
        out.push_back({false, su2_rotation(kYAxis, M_PI / 2.0), {}});
    }
    out.push_back({false, moebius_at(pm.core, x), {}});
}

Homog normalized(const Homog& h) {
    double s = std::sqrt(std::norm(h.h1) + std::norm(h.h2));
    return {h.h1 / s, h.h2 / s};
}

}  // namespace

// ---- FibredSystem ----------------------------------------------------------

FibredSystem::FibredSystem(base::ToralAutomorphism g, FibreSpec spec)
    : base_(g), spec_(std::move(spec)) {
    kind_ = (std::holds_alternative<MoebiusSpec>(spec_) ||
             std::holds_alternative<PerturbedMoebiusSpec>(spec_))
                ? FibreKind::Sphere
                : FibreKind::Torus;
    validate();
}

FibrePoint FibredSystem::fibre_map(const base::ToralPoint& x, const FibrePoint& v) const {
    if (kind_ == FibreKind::Torus) {
        Vec2 u = std::get<Vec2>(v);
        Vec2 xb = x.vec();
        if (const auto* a = std::get_if<AffineSpec>(&spec_)) {
            Vec2 lv = a->L.mat() * u;
            Vec2 w = a->w.eval(xb);
            return Vec2{mod1(lv.x + w.x), mod1(lv.y + w.y)};
        }
        if (const auto* s = std::get_if<ShearSpec>(&spec_)) {
            Vec2 w = s->w.eval(xb);
            return Vec2{mod1(u.x + s->alpha.eval(u.y) + w.x), mod1(u.y + w.y)};
        }
        const auto& p = std::get<PerturbedAffineSpec>(spec_);
        double u1 = u.x + p.eps * p.shear1.eval(u.y, xb);
        double u2 = u.y + p.eps * p.shear2.eval(u1, xb);
        Vec2 lv = p.core.L.mat() * Vec2{u1, u2};
        Vec2 w = p.core.w.eval(xb);
        return Vec2{mod1(lv.x + w.x), mod1(lv.y + w.y)};
    }
    std::vector<SpherePrim> chain;
    sphere_chain(spec_, x.vec(), chain);
    Homog h = to_homog(std::get<SpherePoint>(v));
    for (const auto& p : chain) h = apply_prim(p, h);
    return from_homog(normalized(h));
}

FibrePoint FibredSystem::fibre_map_inverse(const base::ToralPoint& x, const FibrePoint& v) const {
    if (kind_ == FibreKind::Torus) {
        Vec2 u = std::get<Vec2>(v);
        Vec2 xb = x.vec();
        if (const auto* a = std::get_if<AffineSpec>(&spec_)) {
            Vec2 w = a->w.eval(xb);
            Vec2 r = a->L.inv_mat() * Vec2{u.x - w.x, u.y - w.y};
            return Vec2{mod1(r.x), mod1(r.y)};
        }
        if (const auto* s = std::get_if<ShearSpec>(&spec_)) {
            Vec2 w = s->w.eval(xb);
            double v2 = mod1(u.y - w.y);
            double v1 = mod1(u.x - w.x - s->alpha.eval(v2));
            return Vec2{v1, v2};
        }
        // Damped Newton on the fibre, seeded with the affine inverse and, if
        // that stalls, with a coarse grid multistart.
        const auto& p = std::get<PerturbedAffineSpec>(spec_);
        Vec2 w = p.core.w.eval(xb);
        Vec2 guess = p.core.L.inv_mat() * Vec2{u.x - w.x, u.y - w.y};

        auto residual = [&](const Vec2& v) {
            Vec2 img = std::get<Vec2>(fibre_map(x, FibrePoint{v}));
            return Vec2{wrap_half(img.x - u.x), wrap_half(img.y - u.y)};
        };
        auto newton = [&](Vec2 cur, Vec2& out) {
            Vec2 res = residual(cur);
            double rn = std::hypot(res.x, res.y);
            for (int it = 0; it < 60; ++it) {
                if (rn < 1e-12) {
                    out = cur;
                    return true;
                }
                Mat2 j = centre_jacobian({x, FibrePoint{cur}});
                Vec2 dlt = j.inverse() * res;
                double stepsz = 1.0;
                bool improved = false;
                for (int half = 0; half < 8; ++half) {
                    Vec2 trial{mod1(cur.x - stepsz * dlt.x), mod1(cur.y - stepsz * dlt.y)};
                    Vec2 tres = residual(trial);
                    double tn = std::hypot(tres.x, tres.y);
                    if (tn < rn) {
                        cur = trial;
                        res = tres;
                        rn = tn;
                        improved = true;
                        break;
                    }
                    stepsz *= 0.5;
                }
                if (!improved) return false;
            }
            return false;
        };

        Vec2 out;
        if (newton(Vec2{mod1(guess.x), mod1(guess.y)}, out)) return out;
        for (int gi = 0; gi < 8; ++gi)
            for (int gj = 0; gj < 8; ++gj)
                if (newton(Vec2{(gi + 0.5) / 8.0, (gj + 0.5) / 8.0}, out)) return out;
        throw Error(ErrorCode::NewtonDivergence, "fibre inversion did not converge");
    }
    std::vector<SpherePrim> chain;
    sphere_chain(spec_, x.vec(), chain);
    Homog h = to_homog(std::get<SpherePoint>(v));
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) h = apply_prim_inverse(*it, h);
    return from_homog(normalized(h));
}

SystemPoint FibredSystem::evaluate(const SystemPoint& p) const {
    return {base::iterate(base_, p.x, 1), fibre_map(p.x, p.v)};
}

SystemPoint FibredSystem::invert(const SystemPoint& p) const {
    base::ToralPoint xprev = base::iterate(base_, p.x, -1);
    return {xprev, fibre_map_inverse(xprev, p.v)};
}

Mat2 FibredSystem::centre_jacobian(const SystemPoint& p) const {
    if (kind_ == FibreKind::Torus) {
        Vec2 u = std::get<Vec2>(p.v);
        Vec2 xb = p.x.vec();
        if (const auto* a = std::get_if<AffineSpec>(&spec_)) return a->L.mat();
        if (const auto* s = std::get_if<ShearSpec>(&spec_))
            return Mat2{1.0, s->alpha.deriv(u.y), 0.0, 1.0};
        const auto& pa = std::get<PerturbedAffineSpec>(spec_);
        double d1 = pa.eps * pa.shear1.dt(u.y, xb);
        double u1 = u.x + pa.eps * pa.shear1.eval(u.y, xb);
        double d2 = pa.eps * pa.shear2.dt(u1, xb);
        Mat2 j1{1.0, d1, 0.0, 1.0};
        Mat2 j2{1.0, 0.0, d2, 1.0};
        return pa.core.L.mat() * (j2 * j1);
    }
    std::vector<SpherePrim> chain;
    sphere_chain(spec_, p.x.vec(), chain);
    Homog h = to_homog(std::get<SpherePoint>(p.v));
    Mat2 acc = Mat2::identity();
    for (const auto& prim : chain) {
        Homog img;
        Mat2 j = prim_frame_jacobian(prim, h, img);
        acc = j * acc;
        h = normalized(img);
    }
    return acc;
}

std::pair<SystemPoint, Mat2> FibredSystem::step(const SystemPoint& p) const {
    if (kind_ == FibreKind::Sphere) {
        std::vector<SpherePrim> chain;
        sphere_chain(spec_, p.x.vec(), chain);
        Homog h = to_homog(std::get<SpherePoint>(p.v));
        Mat2 acc = Mat2::identity();
        for (const auto& prim : chain) {
            Homog img;
            Mat2 j = prim_frame_jacobian(prim, h, img);
            acc = j * acc;
            h = normalized(img);
        }
        return {{base::iterate(base_, p.x, 1), FibrePoint{from_homog(h)}}, acc};
    }
    return {evaluate(p), centre_jacobian(p)};
}

double FibredSystem::fibre_area_jacobian(const SystemPoint& p) const {
    return centre_jacobian(p).det();
}

bool FibredSystem::fibre_volume_preserving() const {
    if (const auto* m = std::get_if<MoebiusSpec>(&spec_))
        return m->mode == MoebiusSpec::Mode::Rotation;
    if (const auto* pm = std::get_if<PerturbedMoebiusSpec>(&spec_))
        return pm->core.mode == MoebiusSpec::Mode::Rotation;
    return true;  // affine, shear and the shear-composed perturbation
}

std::array<double, 2> FibredSystem::jacobian_lipschitz_bound() const {
    if (std::get_if<AffineSpec>(&spec_)) return {0.0, 0.0};
    if (const auto* s = std::get_if<ShearSpec>(&spec_))
        return {0.0, s->alpha.sup_deriv2()};  // base point does not enter D^c
    if (const auto* pa = std::get_if<PerturbedAffineSpec>(&spec_)) {
        // conservative: |L| (g2 (1 + eps d1)^2 + g1 + d2-coupling), same bound
        // for both axes since the shears couple t and x symmetrically
        double ln = pa->core.L.mat().frobenius();
        double d1 = pa->eps * pa->shear1.sup_dt();
        double g1 = pa->eps * pa->shear1.sup_dt_grad();
        double g2 = pa->eps * pa->shear2.sup_dt_grad();
        double b = ln * (g2 * (1.0 + d1) * (1.0 + d1) + g1 * (2.0 + d1 + g2));
        return {b, b};
    }
    // Sphere specs: coarse bound from coefficient variation.
    const MoebiusSpec* m = std::get_if<MoebiusSpec>(&spec_);
    double eps = 0.0, twist = 0.0;
    if (const auto* pm = std::get_if<PerturbedMoebiusSpec>(&spec_)) {
        m = &pm->core;
        eps = std::abs(pm->eps);
        auto prof = [](const TwistProfile& t) {
            double s = 0.0;
            for (std::size_t k = 0; k < t.coeffs.size(); ++k)
                s += std::abs(t.coeffs[k]) * double(k * k + k + 1);
            return s;
        };
        twist = prof(pm->twist_z) + prof(pm->twist_x);
    }
    double ang = 0.0;
    if (m->mode == MoebiusSpec::Mode::Rotation) {
        for (const auto& h : m->angle.harmonics)
            ang += std::abs(h.amp) * 2.0 * M_PI * (std::abs(h.k[0]) + std::abs(h.k[1]));
        ang += std::abs(m->angle.c0) + 1.0;
    } else {
        for (const auto* f : {&m->a, &m->b, &m->c, &m->d})
            for (const auto& h : f->harmonics)
                ang += std::abs(h.c) * (1.0 + 2.0 * M_PI * (std::abs(h.k[0]) + std::abs(h.k[1])));
    }
    double b = 8.0 * (ang + eps * twist);
    return {b, b};
}

FibrePoint FibredSystem::random_fibre_point(Rng& rng) const {
    if (kind_ == FibreKind::Torus) return Vec2{rng.uniform(), rng.uniform()};
    double Z = 2.0 * rng.uniform() - 1.0;
    double phi = 2.0 * M_PI * rng.uniform();
    double r = std::sqrt(std::max(0.0, 1.0 - Z * Z));
    return SpherePoint{r * std::cos(phi), r * std::sin(phi), Z};
}

void FibredSystem::validate() const {
    const int nb = 8, nf = 16;
    for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < nb; ++j) {
            base::ToralPoint x{(i + 0.5) / nb, (j + 0.5) / nb};
            for (int k = 0; k < nf; ++k) {
                for (int l = 0; l < nf; ++l) {
                    FibrePoint v;
                    if (kind_ == FibreKind::Torus) {
                        v = Vec2{(k + 0.5) / nf, (l + 0.5) / nf};
                    } else {
                        double Z = -1.0 + 2.0 * (k + 0.5) / nf;
                        double phi = 2.0 * M_PI * (l + 0.5) / nf;
                        double r = std::sqrt(std::max(0.0, 1.0 - Z * Z));
                        v = SpherePoint{r * std::cos(phi), r * std::sin(phi), Z};
                    }
                    double det = centre_jacobian({x, v}).det();
                    if (!std::isfinite(det) || std::abs(det) < 0.1)
                        throw Error(ErrorCode::ConfigInvalid,
                                    "fibre map degenerates: |det D^c| < 0.1 on sample grid");
                }
            }
        }
    }
}

}  // namespace phlab::fibred
