#include "phlab/conformal.hpp"

#include <cmath>

#include "doctest.h"
#include "phlab/errors.hpp"
#include "phlab/projective.hpp"
#include "phlab/rng.hpp"

using namespace phlab;
using namespace phlab::conformal;
using phlab::projective::FibreConditional;

namespace {

double disc_hyperbolic(Complex z1, Complex z2) {
    return 2.0 * std::atanh(std::abs((z1 - z2) / (1.0 - std::conj(z2) * z1)));
}

CircleMeasure atoms(std::initializer_list<std::pair<double, double>> list) {
    CircleMeasure m;
    for (auto [ang, mass] : list) m.atoms.push_back({ang, mass});
    return m;
}

Complex push_disc(Complex z, Complex a, double alpha) {
    return std::polar(1.0, alpha) * (z - a) / (1.0 - std::conj(a) * z);
}

CircleMeasure push_measure(const CircleMeasure& m, Complex a, double alpha) {
    CircleMeasure out;
    for (const auto& atom : m.atoms) {
        Complex zeta = std::polar(1.0, atom.angle);
        Complex img = push_disc(zeta, a, alpha);
        out.atoms.push_back({std::atan2(img.imag(), img.real()), atom.mass});
    }
    return out;
}

FibreConditional uniform_conditional(int bins) {
    FibreConditional c;
    c.mass.assign(bins, 1.0 / bins);
    c.samples = 100000;
    return c;
}

// Pushforward of the uniform direction measure under a linear map, binned.
FibreConditional pushed_uniform(const Mat2& g, int bins, int fine = 20000) {
    FibreConditional c;
    c.mass.assign(bins, 0.0);
    c.samples = fine;
    for (int j = 0; j < fine; ++j) {
        double theta = (j + 0.5) * M_PI / fine;
        c.mass[projective::angle_bin(projective::projectivize(g, theta), bins)] += 1.0 / fine;
    }
    return c;
}

}  // namespace

TEST_CASE("boundary identification") {
    CHECK(proj_to_circle(0.0) == 0.0);
    CHECK(proj_to_circle(M_PI / 2.0) == doctest::Approx(M_PI).epsilon(1e-15));
    for (int j = 0; j < 360; ++j) {
        double theta = j * M_PI / 360.0;
        CHECK(circle_to_proj(proj_to_circle(theta)) == doctest::Approx(theta).epsilon(1e-12));
    }
    // rotation by pi/2 on directions is rotation by pi on the boundary circle
    for (double theta : {0.1, 0.7, 1.9, 2.8}) {
        double lhs = proj_to_circle(mod_pi(theta + M_PI / 2.0));
        double rhs = mod_2pi(proj_to_circle(theta) + M_PI);
        CHECK(circle_dist(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("barycentre symmetry cases") {
    auto four = atoms({{0.0, 0.25}, {M_PI / 2, 0.25}, {M_PI, 0.25}, {3 * M_PI / 2, 0.25}});
    auto b4 = barycentre(four, 1e-12);
    CHECK(std::abs(b4.w) < 1e-10);

    double w3 = 2.0 * M_PI / 3.0;
    auto three = atoms({{0.0, 1.0 / 3}, {w3, 1.0 / 3}, {2 * w3, 1.0 / 3}});
    CHECK(std::abs(barycentre(three, 1e-12).w) < 1e-10);

    // random rotation-symmetric measures, n >= 3
    Rng rng(404);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 3 + rng.uniform_int(4);
        CircleMeasure m;
        for (int rep = 0; rep < 2; ++rep) {
            double ang = rng.uniform() * 2.0 * M_PI;
            double mass = 0.1 + 0.4 * rng.uniform();
            for (int k = 0; k < n; ++k) m.atoms.push_back({ang + 2.0 * M_PI * k / n, mass});
        }
        double total = m.total();
        for (auto& a : m.atoms) a.mass /= total;
        CHECK(std::abs(barycentre(m, 1e-12).w) < 1e-10);
    }
}

TEST_CASE("barycentre equivariance under disc Moebius maps") {
    Rng rng(505);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        CircleMeasure m;
        int n = 4 + rng.uniform_int(5);
        for (int k = 0; k < n; ++k)
            m.atoms.push_back({rng.uniform() * 2.0 * M_PI, 0.1 + rng.uniform()});
        double total = m.total();
        for (auto& a : m.atoms) a.mass /= total;
        if (m.max_atom_mass() >= 0.45) continue;

        Complex a = std::polar(0.7 * rng.uniform(), rng.uniform() * 2.0 * M_PI);
        double alpha = rng.uniform() * 2.0 * M_PI;
        auto lhs = barycentre(push_measure(m, a, alpha), 1e-13).w;
        auto rhs = push_disc(barycentre(m, 1e-13).w, a, alpha);
        worst = std::max(worst, disc_hyperbolic(lhs, rhs));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("barycentre continuity in the masses") {
    auto base = atoms({{0.3, 0.3}, {1.9, 0.25}, {3.5, 0.25}, {5.1, 0.2}});
    Complex b0 = barycentre(base, 1e-13).w;
    std::vector<double> slopes;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
        CircleMeasure m = base;
        m.atoms[0].mass += delta;
        m.atoms[2].mass -= delta;
        Complex b = barycentre(m, 1e-13).w;
        slopes.push_back(std::abs(b - b0) / delta);
    }
    for (double s : slopes) {
        CHECK(std::isfinite(s));
        CHECK(s > 0.0);
    }
    CHECK(slopes[1] < 3.0 * slopes[0]);
    CHECK(slopes[1] > slopes[0] / 3.0);
    CHECK(slopes[2] < 3.0 * slopes[1]);
    CHECK(slopes[2] > slopes[1] / 3.0);
}

TEST_CASE("zero certificate and local uniqueness probe") {
    Rng rng(606);
    double tol = 1e-12;
    for (int trial = 0; trial < 20; ++trial) {
        CircleMeasure m;
        for (int k = 0; k < 5; ++k)
            m.atoms.push_back({rng.uniform() * 2.0 * M_PI, 0.15 + rng.uniform() * 0.2});
        double total = m.total();
        for (auto& a : m.atoms) a.mass /= total;
        if (m.max_atom_mass() >= 0.45) continue;
        auto b = barycentre(m, tol);
        CHECK(std::abs(disc_field(m, b.w)) < tol);
        for (int k = 0; k < 8; ++k) {
            Complex probe = b.w + 10.0 * tol * std::polar(1.0, k * M_PI / 4.0);
            CHECK(std::abs(disc_field(m, probe)) > tol);
        }
    }
}

TEST_CASE("heavy atoms are rejected") {
    CHECK_THROWS_AS(barycentre(atoms({{0.0, 0.55}, {2.0, 0.45}})), Error);
    CHECK_THROWS_AS(barycentre(atoms({{0.0, 0.48}, {2.0, 0.27}, {4.0, 0.25}})), Error);
    CHECK_NOTHROW(barycentre(atoms({{0.0, 0.40}, {2.0, 0.35}, {4.0, 0.25}})));
}

TEST_CASE("structure from measures") {
    SUBCASE("uniform gives the standard structure") {
        auto s = structure_from_measure(uniform_conditional(360));
        CHECK(hyperbolic_distance(s.tau, Complex{0.0, 1.0}) < 1e-9);
    }

    SUBCASE("pushforward of uniform by a linear map") {
        Rng rng(707);
        for (int trial = 0; trial < 15; ++trial) {
            Mat2 g{1.0 + rng.uniform(), rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8),
                   1.0 + rng.uniform()};
            if (std::abs(g.det()) < 0.3) continue;
            auto s = structure_from_measure(pushed_uniform(g, 360));
            ConformalStructureTau oracle =
                pushforward_structure(ConformalStructureTau{}, g);
            CHECK(hyperbolic_distance(s.tau, oracle.tau) < 0.02);
        }
    }

    SUBCASE("equivariance under GL(2,R)") {
        Rng rng(808);
        for (int trial = 0; trial < 10; ++trial) {
            Mat2 g{1.2, 0.3, -0.2, 0.9};
            Mat2 a{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
                   rng.uniform(-1.5, 1.5)};
            if (std::abs(a.det()) < 0.4) continue;
            auto s_base = structure_from_measure(pushed_uniform(g, 720));
            auto s_pushed = structure_from_measure(pushed_uniform(a * g, 720));
            auto oracle = pushforward_structure(s_base, a);
            CHECK(hyperbolic_distance(s_pushed.tau, oracle.tau) < 0.03);
        }
    }

    SUBCASE("scale invariance is exact for exact scalings") {
        auto c = pushed_uniform(Mat2{1.4, 0.2, 0.1, 0.8}, 360);
        auto s1 = structure_from_measure(c);
        FibreConditional scaled = c;
        for (auto& m : scaled.mass) m *= 2.0;
        auto s2 = structure_from_measure(scaled);
        CHECK(s1.tau.real() == s2.tau.real());
        CHECK(s1.tau.imag() == s2.tau.imag());
    }
}

TEST_CASE("invariant structures of elliptic matrices") {
    auto order4 = fibred::make_elliptic({{{0, -1}, {1, 0}}});
    auto s4 = invariant_structure_of(order4);
    CHECK(std::abs(s4.tau - Complex{0.0, 1.0}) < 1e-14);

    auto order6 = fibred::make_elliptic({{{0, -1}, {1, 1}}});
    auto s6 = invariant_structure_of(order6);
    CHECK(std::abs(s6.tau - Complex{-0.5, std::sqrt(3.0) / 2.0}) < 1e-14);

    auto order3 = fibred::make_elliptic({{{-1, -1}, {1, 0}}});
    auto s3 = invariant_structure_of(order3);
    // fixed structure is preserved by L: congruence leaves the representative fixed
    Mat2 L = order3.mat();
    Mat2 q = s3.representative();
    Mat2 pushed = L.inverse().transpose() * q * L.inverse();
    CHECK((pushed - q).max_abs_entry() < 1e-12);

    CHECK_THROWS_AS(invariant_structure_of(fibred::make_elliptic({{{-1, 0}, {0, -1}}})), Error);
    CHECK_THROWS_AS(invariant_structure_of(fibred::make_elliptic({{{1, 0}, {0, 1}}})), Error);

    // L-averaged pushforward of uniform is L-invariant; its barycentre is tau_L
    FibreConditional avg;
    avg.mass.assign(720, 0.0);
    avg.samples = 3;
    Mat2 pk = Mat2::identity();
    for (int k = 0; k < 3; ++k) {
        auto part = pushed_uniform(pk, 720);
        for (int b = 0; b < 720; ++b) avg.mass[b] += part.mass[b] / 3.0;
        pk = order6.mat() * pk;
    }
    auto s_avg = structure_from_measure(avg);
    CHECK(hyperbolic_distance(s_avg.tau, s6.tau) < 0.02);
}

TEST_CASE("representative round trip") {
    Rng rng(909);
    for (int i = 0; i < 50; ++i) {
        ConformalStructureTau s;
        s.tau = Complex{rng.uniform(-2.0, 2.0), 0.1 + 2.0 * rng.uniform()};
        auto rt = ConformalStructureTau::from_representative(s.representative());
        CHECK(std::abs(rt.tau - s.tau) < 1e-12);
        CHECK(std::abs(s.representative().det() - 1.0) < 1e-12);
    }
}

TEST_CASE("barycentre fields over synthetic disintegrations") {
    // 3x3 base, 3x3 fibre, 64 bins: every cell carries the same pushed-uniform
    projective::DisintegrationField field(3, 3, 64);
    Mat2 g{1.3, 0.25, 0.1, 0.85};
    auto cond = pushed_uniform(g, 64, 5000);
    for (int cell = 0; cell < field.n_cells(); ++cell)
        for (int b = 0; b < 64; ++b) {
            int reps = int(cond.mass[b] * 5000 + 0.5);
            for (int r = 0; r < reps; ++r) field.record(cell, b);
        }
    BarycentreFieldParams prm;
    prm.min_samples = 100;
    auto bf = barycentre_field(field, prm);
    CHECK(bf.n_valid == field.n_cells());
    CHECK(bf.oscillation < 1e-12);  // identical cells
    auto oracle = pushforward_structure(ConformalStructureTau{}, g);
    CHECK(hyperbolic_distance(bf.mean_tau, oracle.tau) < 0.05);

    // a heavy cell is reported with its index
    projective::DisintegrationField bad(2, 2, 64);
    for (int cell = 0; cell < bad.n_cells(); ++cell)
        for (int b = 0; b < 64; ++b)
            for (int r = 0; r < (cell == 5 ? (b == 10 ? 200 : 1) : 4); ++r) bad.record(cell, b);
    CHECK_THROWS_WITH_AS(barycentre_field(bad, prm), doctest::Contains("cell 5"), Error);
}
