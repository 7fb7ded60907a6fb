// Acceptance suite: runs every acceptance criterion at full scale and prints
// one pass/fail line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "phlab/conformal.hpp"
#include "phlab/errors.hpp"
#include "phlab/experiment.hpp"
#include "phlab/holonomy.hpp"
#include "phlab/json_io.hpp"
#include "phlab/lyapunov.hpp"
#include "phlab/rng.hpp"
#include "phlab/trichotomy.hpp"
#include "phlab/uniformize.hpp"

using namespace phlab;
using nlohmann::json;

namespace {

int g_failures = 0;

void report(int id, bool ok, const std::string& details) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, details.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

fibred::FibredSystem preset_system(const std::string& name) {
    return json_io::parse_system(experiment::preset_by_name(name).config["system"]);
}

projective::ClassifyConfig preset_classify_config(const std::string& name, int workers) {
    auto cfg = experiment::parse_config(experiment::preset_by_name(name).config);
    json p = cfg.canonical["params"];
    projective::ClassifyConfig cc;
    cc.exponents.n_iter = p["exponents"]["n_iter"].get<long long>();
    cc.exponents.n_orbits = p["exponents"]["n_orbits"].get<int>();
    cc.exponents.seed = cfg.seed;
    cc.exponents.workers = workers;
    cc.bunching.base_grid = p["bunching"]["base_grid"].get<int>();
    cc.bunching.fibre_grid = p["bunching"]["fibre_grid"].get<int>();
    cc.bunching.workers = workers;
    cc.disintegration.base_n = p["disintegration"]["base_n"].get<int>();
    cc.disintegration.fibre_n = p["disintegration"]["fibre_n"].get<int>();
    cc.disintegration.n_bins = p["disintegration"]["n_bins"].get<int>();
    cc.disintegration.n_particles = p["disintegration"]["n_particles"].get<int>();
    cc.disintegration.n_steps = p["disintegration"]["n_steps"].get<long long>();
    cc.disintegration.burn_in = p["disintegration"]["burn_in"].get<long long>();
    cc.disintegration.seed = derive_seed(cfg.seed, 1000001);
    cc.disintegration.workers = workers;
    cc.invariance.n_pairs = p["invariance"]["n_pairs"].get<int>();
    cc.invariance.seed = derive_seed(cfg.seed, 1000002);
    cc.barycentre.workers = workers;
    return cc;
}

double wall_seconds(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const int kWorkers = 8;

// ---- criterion 1 & 2 -------------------------------------------------------

void criteria_1_2() {
    const char* zero_presets[] = {"affine_order3", "affine_order4", "affine_order6", "shear"};
    bool c1 = true;
    std::string c1_detail = "zero-exponent presets:";
    std::vector<std::pair<std::string, lyap::ExponentEstimate>> estimates;
    for (const char* name : zero_presets) {
        auto f = preset_system(name);
        lyap::ExponentParams prm;
        prm.n_iter = 1000000;
        prm.n_orbits = 32;
        prm.seed = 20260810;
        prm.workers = 1;  // the runtime gate is per laptop core
        auto t0 = std::chrono::steady_clock::now();
        auto est = lyap::centre_exponents(f, prm);
        double wall = wall_seconds(t0);
        estimates.emplace_back(name, est);
        bool ok = std::abs(est.lambda_plus) < 5e-5 && std::abs(est.lambda_minus) < 5e-5 &&
                  wall < 60.0;
        c1 = c1 && ok;
        char buf[160];
        std::snprintf(buf, sizeof buf, " %s |l+|=%.1e |l-|=%.1e %.1fs", name,
                      std::abs(est.lambda_plus), std::abs(est.lambda_minus), wall);
        c1_detail += buf;
    }
    report(1, c1, c1_detail);

    // criterion 2: every volume-preserving preset
    const char* vp_presets[] = {"perturbed", "moebius_rotation", "perturbed_moebius"};
    bool c2 = true;
    std::string c2_detail = "symplectic symmetry:";
    for (const char* name : vp_presets) {
        auto f = preset_system(name);
        lyap::ExponentParams prm;
        prm.n_iter = 200000;
        prm.n_orbits = 16;
        prm.seed = 20260810;
        prm.workers = kWorkers;
        estimates.emplace_back(name, lyap::centre_exponents(f, prm));
    }
    for (const auto& [name, est] : estimates) {
        double res = lyap::check_symplectic_symmetry(est);
        bool ok = res < 3.0 * est.combined_stderr() + 1e-12 &&
                  std::abs(est.det_log_mean) < 1e-12;
        c2 = c2 && ok;
        char buf[160];
        std::snprintf(buf, sizeof buf, " %s |sum|=%.1e 3se=%.1e det=%.1e", name.c_str(), res,
                      3.0 * est.combined_stderr(), std::abs(est.det_log_mean));
        c2_detail += buf;
    }
    report(2, c2, c2_detail);
}

// ---- criterion 3 -----------------------------------------------------------

Vec2 series_translation(const fibred::FibredSystem& f, const base::ToralPoint& x, double t,
                        base::LeafKind kind, int terms = 90) {
    const auto& spec = std::get<fibred::AffineSpec>(f.spec());
    const auto& g = f.base();
    Vec2 e = g.leaf_dir(kind);
    Mat2 L = spec.L.mat();
    Mat2 Linv = spec.L.inv_mat();
    Vec2 acc{0.0, 0.0};
    if (kind == base::LeafKind::Unstable) {
        Mat2 pw = Mat2::identity();
        base::ToralPoint xk = x;
        double offset = t;
        for (int k = 1; k <= terms; ++k) {
            xk = base::iterate(g, xk, -1);
            offset /= g.lambda_u;
            base::ToralPoint yk{xk.x1 + offset * e.x, xk.x2 + offset * e.y};
            acc += pw * (spec.w.eval(yk.vec()) - spec.w.eval(xk.vec()));
            pw = L * pw;
        }
    } else {
        Mat2 pw = Linv;
        base::ToralPoint xk = x;
        double offset = t;
        for (int k = 0; k <= terms; ++k) {
            base::ToralPoint yk{xk.x1 + offset * e.x, xk.x2 + offset * e.y};
            acc += pw * (spec.w.eval(xk.vec()) - spec.w.eval(yk.vec()));
            pw = pw * Linv;
            xk = base::iterate(g, xk, 1);
            offset *= g.lambda_s;
        }
    }
    return acc;
}

void criterion_3() {
    bool ok = true;
    double worst_dev = 0.0, worst_oracle = 0.0;
    for (const char* name : {"affine_order3", "affine_order4", "affine_order6"}) {
        auto f = preset_system(name);
        Rng rng(33 + name[12]);
        holonomy::HolonomyParams prm;
        prm.tol = 1e-10;
        for (int i = 0; i < 100; ++i) {
            base::ToralPoint x{rng.uniform(), rng.uniform()};
            double t = rng.uniform(-0.5, 0.5);
            base::ToralPoint y = base::leaf_point(f.base(), x, base::LeafKind::Unstable, t);
            auto h = holonomy::fibre_holonomy(f, x, y, base::LeafKind::Unstable, prm);
            if (!h.translation) {
                ok = false;
                continue;
            }
            worst_dev = std::max(worst_dev, h.translation_max_dev);
            Vec2 oracle = series_translation(f, x, t, base::LeafKind::Unstable);
            worst_oracle = std::max(
                worst_oracle,
                torus_dist(*h.translation, Vec2{mod1(oracle.x), mod1(oracle.y)}));
        }
    }
    ok = ok && worst_dev < 1e-6 && worst_oracle < 1e-6;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "holonomy translations: max dev %.2e, max oracle gap %.2e (300 pairs)",
                  worst_dev, worst_oracle);
    report(3, ok, buf);
}

// ---- criterion 4 -----------------------------------------------------------

void criterion_4() {
    // ratio fit on the shear preset: affine derivative holonomies are the
    // identity at every truncation, so their gaps sit at float noise
    auto f = preset_system("shear");
    Rng rng(44);
    double ratio_sum = 0.0;
    int ratio_n = 0;
    for (int trial = 0; trial < 5; ++trial) {
        fibred::SystemPoint p{{rng.uniform(), rng.uniform()}, Vec2{rng.uniform(), rng.uniform()}};
        auto gaps = holonomy::derivative_gap_sequence(f, p, 0.07, base::LeafKind::Unstable, 24);
        for (std::size_t i = 1; i < gaps.size(); ++i) {
            if (gaps[i].second > 1e-13 && gaps[i - 1].second > 1e-12) {
                ratio_sum += gaps[i].second / gaps[i - 1].second;
                ++ratio_n;
            }
        }
    }
    double ratio = ratio_sum / std::max(1, ratio_n);
    double target = std::abs(f.base().lambda_s);
    bool ratio_ok = ratio_n >= 20 && std::abs(ratio - target) < 0.2 * target;

    // det = 1 within 1e-6 across volume-preserving presets
    double worst_det = 0.0;
    holonomy::HolonomyParams prm;
    prm.tol = 1e-9;
    for (const char* name : {"affine_order6", "shear", "moebius_rotation"}) {
        auto sys = preset_system(name);
        Rng r2(45);
        for (int i = 0; i < 20; ++i) {
            fibred::SystemPoint p{{r2.uniform(), r2.uniform()}, sys.random_fibre_point(r2)};
            auto kind = (i % 2 == 0) ? base::LeafKind::Unstable : base::LeafKind::Stable;
            base::ToralPoint y = base::leaf_point(sys.base(), p.x, kind, r2.uniform(-0.2, 0.2));
            auto d = holonomy::derivative_holonomy(sys, p, y, kind, prm);
            worst_det = std::max(worst_det, std::abs(d.matrix.det() - 1.0));
        }
    }
    bool ok = ratio_ok && worst_det < 1e-6;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "derivative holonomy: gap ratio %.3f (target %.3f +-20%%), max |det-1| %.1e",
                  ratio, target, worst_det);
    report(4, ok, buf);
}

// ---- criterion 5 -----------------------------------------------------------

void criterion_5() {
    bool ok = true;
    // symmetry cases
    conformal::CircleMeasure four;
    for (int k = 0; k < 4; ++k) four.atoms.push_back({k * M_PI / 2.0, 0.25});
    ok = ok && std::abs(conformal::barycentre(four, 1e-12).w) < 1e-10;
    conformal::CircleMeasure three;
    for (int k = 0; k < 3; ++k) three.atoms.push_back({k * 2.0 * M_PI / 3.0, 1.0 / 3.0});
    ok = ok && std::abs(conformal::barycentre(three, 1e-12).w) < 1e-10;

    // equivariance over 100 random (measure, Moebius) pairs + uniqueness probe
    Rng rng(55);
    double worst_eq = 0.0;
    int done = 0;
    bool probe_ok = true;
    while (done < 100) {
        conformal::CircleMeasure m;
        int n = 4 + rng.uniform_int(5);
        for (int k = 0; k < n; ++k)
            m.atoms.push_back({rng.uniform() * 2.0 * M_PI, 0.1 + rng.uniform()});
        double total = m.total();
        for (auto& a : m.atoms) a.mass /= total;
        if (m.max_atom_mass() >= 0.45) continue;
        ++done;
        double tol = 1e-12;
        auto b = conformal::barycentre(m, tol);
        if (std::abs(conformal::disc_field(m, b.w)) >= tol) probe_ok = false;
        for (int k = 0; k < 8; ++k) {
            std::complex<double> probe =
                b.w + 10.0 * tol * std::polar(1.0, k * M_PI / 4.0);
            if (std::abs(conformal::disc_field(m, probe)) <= tol) probe_ok = false;
        }
        std::complex<double> a = std::polar(0.7 * rng.uniform(), rng.uniform() * 2 * M_PI);
        double alpha = rng.uniform() * 2.0 * M_PI;
        conformal::CircleMeasure pushed;
        for (const auto& atom : m.atoms) {
            auto img = std::polar(1.0, alpha) * (std::polar(1.0, atom.angle) - a) /
                       (1.0 - std::conj(a) * std::polar(1.0, atom.angle));
            pushed.atoms.push_back({std::atan2(img.imag(), img.real()), atom.mass});
        }
        auto lhs = conformal::barycentre(pushed, 1e-13).w;
        auto rhs = std::polar(1.0, alpha) * (b.w - a) / (1.0 - std::conj(a) * b.w);
        worst_eq = std::max(
            worst_eq, 2.0 * std::atanh(std::abs((lhs - rhs) / (1.0 - std::conj(rhs) * lhs))));
    }
    ok = ok && worst_eq < 1e-8 && probe_ok;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "barycentre: symmetry zeros, equivariance max %.1e over 100 pairs, "
                  "uniqueness probes %s",
                  worst_eq, probe_ok ? "pass" : "fail");
    report(5, ok, buf);
}

// ---- criterion 6 -----------------------------------------------------------

projective::TrichotomyReport run_classify(const std::string& preset,
                                          const projective::ClassifyConfig& cc) {
    auto f = preset_system(preset);
    return projective::classify_trichotomy(f, cc);
}

void criterion_6() {
    bool ok = true;
    std::string detail = "trichotomy:";

    auto shear_cc = preset_classify_config("shear", kWorkers);
    auto shear_rep = run_classify("shear", shear_cc);
    bool shear_ok = shear_rep.verdict == projective::Verdict::LineField &&
                    shear_rep.line_field_count == 1;
    detail += std::string(" shear->") + projective::verdict_name(shear_rep.verdict);

    auto affine_cc = preset_classify_config("affine_order4", kWorkers);
    auto affine_rep = run_classify("affine_order4", affine_cc);
    bool affine_ok = affine_rep.verdict == projective::Verdict::ConformalStructure;
    double worst_tau = 0.0;
    if (affine_ok && affine_rep.structure_field) {
        auto oracle = conformal::invariant_structure_of(
            std::get<fibred::AffineSpec>(preset_system("affine_order4").spec()).L);
        for (std::size_t c = 0; c < affine_rep.structure_field->tau.size(); ++c) {
            if (!affine_rep.structure_field->valid[c]) continue;
            worst_tau = std::max(worst_tau, conformal::hyperbolic_distance(
                                                affine_rep.structure_field->tau[c], oracle.tau));
        }
        affine_ok = affine_ok && worst_tau < 0.05;
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, " affine->%s tau_dev=%.3f",
                  projective::verdict_name(affine_rep.verdict), worst_tau);
    detail += buf;

    auto pert_cc = preset_classify_config("perturbed", kWorkers);
    auto pert_rep = run_classify("perturbed", pert_cc);
    bool pert_ok = pert_rep.verdict == projective::Verdict::DistinctExponents &&
                   pert_rep.exponents.gap() > 10.0 * pert_rep.exponents.combined_stderr();
    detail += std::string(" perturbed->") + projective::verdict_name(pert_rep.verdict);

    // stability under doubling every resolution parameter (sampling budget is
    // scaled along so cells keep their statistical power)
    auto doubled = [](projective::ClassifyConfig cc) {
        cc.exponents.n_iter *= 2;
        cc.disintegration.base_n *= 2;
        cc.disintegration.fibre_n *= 2;
        cc.disintegration.n_bins *= 2;
        cc.disintegration.n_particles *= 4;
        cc.bunching.base_grid *= 2;
        cc.bunching.fibre_grid *= 2;
        return cc;
    };
    auto shear2 = run_classify("shear", doubled(shear_cc));
    auto affine2 = run_classify("affine_order4", doubled(affine_cc));
    auto pert2 = run_classify("perturbed", doubled(pert_cc));
    bool stable = shear2.verdict == shear_rep.verdict && shear2.line_field_count == 1 &&
                  affine2.verdict == affine_rep.verdict && pert2.verdict == pert_rep.verdict;
    detail += std::string(" doubled:[") + projective::verdict_name(shear2.verdict) + "," +
              projective::verdict_name(affine2.verdict) + "," +
              projective::verdict_name(pert2.verdict) + "]";

    ok = shear_ok && affine_ok && pert_ok && stable;
    report(6, ok, detail);
}

// ---- criterion 7 -----------------------------------------------------------

void criterion_7() {
    bool ok = true;
    // constant closed form
    uniformize::BeltramiSolveParams sp;
    sp.tol = 1e-10;
    double worst_const = 0.0;
    for (double c : {0.3, -0.2, 0.5}) {
        auto w = uniformize::solve_beltrami_periodic(
            uniformize::BeltramiGrid::constant(128, {c, 0.0}), sp);
        Rng rng(7);
        for (int i = 0; i < 50; ++i) {
            std::complex<double> z{rng.uniform(), rng.uniform()};
            std::complex<double> expect = (z + c * std::conj(z)) / (1.0 + c);
            worst_const = std::max(worst_const, std::abs(w.value(z) - expect));
        }
    }
    ok = ok && worst_const < 1e-8;

    auto mu_fn = [](double x, double) {
        return std::complex<double>{0.2 * std::cos(2.0 * M_PI * x), 0.0};
    };
    sp.tol = 1e-9;
    auto g128 = uniformize::BeltramiGrid::from_function(128, mu_fn);
    auto w128 = uniformize::solve_beltrami_periodic(g128, sp);
    bool residual_ok = w128.residual < 1e-8;

    auto w256 = uniformize::solve_beltrami_periodic(
        uniformize::BeltramiGrid::from_function(256, mu_fn), sp);
    Rng rng(8);
    double worst_ref = 0.0;
    for (int i = 0; i < 100; ++i) {
        std::complex<double> z{rng.uniform(), rng.uniform()};
        worst_ref = std::max(worst_ref, std::abs(w128.value(z) - w256.value(z)));
    }
    ok = ok && residual_ok && worst_ref < 1e-6;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "beltrami: const-mu max err %.1e, harmonic residual %.1e, refinement %.1e",
                  worst_const, w128.residual, worst_ref);
    report(7, ok, buf);
}

// ---- criterion 8 -----------------------------------------------------------

void criterion_8() {
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(88);
    bool ok = true;
    std::string detail;
    int done = 0;
    std::array<std::array<std::array<long long, 2>, 2>, 3> gens{
        {{{{-1, -1}, {1, 0}}}, {{{0, -1}, {1, 0}}}, {{{0, -1}, {1, 1}}}}};
    for (int trial = 0; trial < 10; ++trial) {
        auto gen = gens[trial % 3];
        auto L = fibred::make_elliptic(gen);
        FourierMapT2 w;
        w.harmonics.push_back({{1, 0},
                               {0.12 * (rng.uniform() - 0.5), 0.1 * (rng.uniform() - 0.5)},
                               {0.08 * (rng.uniform() - 0.5), 0.0}});
        w.harmonics.push_back({{0, 1},
                               {0.0, 0.1 * (rng.uniform() - 0.5)},
                               {0.12 * (rng.uniform() - 0.5), 0.05 * (rng.uniform() - 0.5)}});
        fibred::FibredSystem f(json_io::parse_system(json_io::system_to_json(
            fibred::FibredSystem(base::make_hyperbolic_automorphism({{{2, 1}, {1, 1}}}),
                                 fibred::AffineSpec{L, w}))));

        auto cc = preset_classify_config("affine_order4", kWorkers);
        cc.exponents.n_iter = 200000;
        cc.exponents.n_orbits = 16;
        cc.exponents.seed = derive_seed(88, trial);
        cc.disintegration.seed = derive_seed(888, trial);
        auto rep = projective::classify_trichotomy(f, cc);
        if (rep.verdict != projective::Verdict::ConformalStructure) {
            ok = false;
            detail += " spec" + std::to_string(trial) + ":not-conformal";
            continue;
        }
        uniformize::AffineModelParams mp;
        mp.workers = kWorkers;
        auto model = uniformize::extract_affine_model(f, rep, mp);
        bool trace_ok = model.trace == gen[0][0] + gen[1][1];
        bool order_ok = model.order == L.order;
        double worst_w = 0.0;
        for (int bi = 0; bi < model.base_n; ++bi)
            for (int bj = 0; bj < model.base_n; ++bj) {
                Vec2 xc{(bi + 0.5) / model.base_n, (bj + 0.5) / model.base_n};
                Vec2 expect = w.eval(xc);
                worst_w = std::max(
                    worst_w, torus_dist(model.w_model[std::size_t(bi) * model.base_n + bj],
                                        Vec2{mod1(expect.x), mod1(expect.y)}));
            }
        bool this_ok = trace_ok && order_ok && worst_w < 1e-3;
        ok = ok && this_ok;
        if (!this_ok)
            detail += " spec" + std::to_string(trial) + (trace_ok ? "" : ":trace") +
                      (order_ok ? "" : ":order") + ":w=" + std::to_string(worst_w);
        ++done;
    }
    double wall = wall_seconds(t0);
    ok = ok && wall < 600.0 && done == 10;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "affine rigidity round trip: %d/10 specs recovered, %.0fs (budget 600s)%s", done,
                  wall, detail.c_str());
    report(8, ok, buf);
}

// ---- criterion 9 -----------------------------------------------------------

void criterion_9() {
    auto f = preset_system("moebius_rotation");
    auto cc = preset_classify_config("moebius_rotation", kWorkers);
    auto rep = projective::classify_trichotomy(f, cc);
    bool ok = rep.verdict == projective::Verdict::ConformalStructure;
    double worst = 1e300;
    if (ok) {
        uniformize::MoebiusModelParams mp;
        mp.workers = kWorkers;
        auto model = uniformize::extract_moebius_model(f, rep, mp);
        const auto& spec = std::get<fibred::MoebiusSpec>(f.spec());
        worst = 0.0;
        for (int bi = 0; bi < model.base_n; ++bi) {
            for (int bj = 0; bj < model.base_n; ++bj) {
                Vec2 xc{(bi + 0.5) / model.base_n, (bj + 0.5) / model.base_n};
                double ang = spec.angle.eval(xc);
                double c = std::cos(ang / 2), s = std::sin(ang / 2);
                uniformize::MoebiusCoefficients gen{
                    {c, s * spec.axis[2]},
                    {s * spec.axis[1], s * spec.axis[0]},
                    {-s * spec.axis[1], s * spec.axis[0]},
                    {c, -s * spec.axis[2]}};
                auto gn = uniformize::normalize_psl2c(gen);
                auto fit = uniformize::normalize_psl2c(
                    model.cells[std::size_t(bi) * model.base_n + bj]);
                // PSL(2,C) representatives are compared modulo the optimal
                // unit phase (the slot-based gauge is unstable at ties)
                std::complex<double> ip = gn.a * std::conj(fit.a) + gn.b * std::conj(fit.b) +
                                          gn.c * std::conj(fit.c) + gn.d * std::conj(fit.d);
                std::complex<double> phase =
                    (std::abs(ip) > 0) ? ip / std::abs(ip) : std::complex<double>{1, 0};
                worst = std::max({worst, std::abs(gn.a - phase * fit.a),
                                  std::abs(gn.b - phase * fit.b),
                                  std::abs(gn.c - phase * fit.c),
                                  std::abs(gn.d - phase * fit.d)});
            }
        }
        ok = ok && worst < 1e-6;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "moebius round trip: verdict %s, max coefficient gap %.1e",
                  projective::verdict_name(rep.verdict), worst);
    report(9, ok, buf);
}

// ---- criterion 10 ----------------------------------------------------------

void criterion_10() {
    auto generic = preset_system("accessibility");
    holonomy::GroupSampleParams prm;
    auto sample = holonomy::holonomy_group_sample(generic, {0.3, 0.4}, 1234, prm);

    auto trivial = preset_system("affine_w0");
    auto sample0 = holonomy::holonomy_group_sample(trivial, {0.3, 0.4}, 1234, prm);

    bool ok = sample.covering_radius < 0.05 && sample0.covering_radius > 0.69;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "accessibility: generic-w radius %.4f (<0.05), w=0 radius %.4f (trivial)",
                  sample.covering_radius, sample0.covering_radius);
    report(10, ok, buf);
}

}  // namespace

int main() {
    std::printf("phlab acceptance suite\n");
    try {
        criteria_1_2();
        criterion_3();
        criterion_4();
        criterion_5();
        criterion_6();
        criterion_7();
        criterion_8();
        criterion_9();
        criterion_10();
    } catch (const Error& e) {
        std::printf("[FAIL] suite aborted: %s\n", e.what());
        return 99;
    }
    std::printf("%s: %d failure(s)\n", g_failures == 0 ? "ALL PASS" : "FAILED", g_failures);
    return g_failures;
}
