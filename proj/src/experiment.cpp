#include "phlab/experiment.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "phlab/errors.hpp"
#include "phlab/rng.hpp"
#include "phlab/sha1.hpp"

namespace phlab::experiment {

namespace fs = std::filesystem;
using json_io::StrictObject;

const char* task_name(Task t) {
    switch (t) {
        case Task::Exponents: return "exponents";
        case Task::Holonomy: return "holonomy";
        case Task::Classify: return "classify";
        case Task::BarycentreField: return "barycentre-field";
        case Task::Uniformize: return "uniformize";
        case Task::Accessibility: return "accessibility";
    }
    return "unknown";
}

namespace {

Task parse_task(const std::string& s) {
    if (s == "exponents") return Task::Exponents;
    if (s == "holonomy") return Task::Holonomy;
    if (s == "classify") return Task::Classify;
    if (s == "barycentre-field") return Task::BarycentreField;
    if (s == "uniformize") return Task::Uniformize;
    if (s == "accessibility") return Task::Accessibility;
    throw Error(ErrorCode::ConfigInvalid, "unknown task '" + s + "'");
}

struct ResolvedParams {
    lyap::ExponentParams exponents;
    lyap::BunchingParams bunching;
    bool skip_bunching = false;
    projective::DisintegrationParams disintegration;
    projective::InvarianceParams invariance;
    conformal::BarycentreFieldParams barycentre;
    projective::ClassifyGates gates;
    // holonomy task
    int holonomy_pairs = 100;
    double holonomy_tol = 1e-10;
    double holonomy_max_t = 0.5;
    int holonomy_sample_grid = 5;
    // accessibility task
    holonomy::GroupSampleParams group;
    // model extraction
    uniformize::AffineModelParams affine_model;
    uniformize::MoebiusModelParams moebius_model;

    json echo;  // params with defaults resolved
};

ResolvedParams resolve_params(Task task, const json& params, std::uint64_t seed, int workers) {
    ResolvedParams out;
    out.exponents.seed = seed;
    out.exponents.workers = workers;
    out.exponents.record_series = true;
    out.bunching.workers = workers;
    out.disintegration.seed = derive_seed(seed, 1000001);
    out.disintegration.workers = workers;
    out.invariance.seed = derive_seed(seed, 1000002);
    out.barycentre.workers = workers;
    out.affine_model.workers = workers;
    out.moebius_model.workers = workers;
    out.group.n_loops = 16;

    json params_doc = params.is_null() ? json::object() : params;
    StrictObject o(params_doc, "params");

    if (const json* e = o.find("exponents")) {
        StrictObject eo(*e, "params.exponents");
        out.exponents.n_iter = eo.integer("n_iter", out.exponents.n_iter);
        out.exponents.n_orbits = int(eo.integer("n_orbits", out.exponents.n_orbits));
        out.exponents.record_series = eo.boolean("record_series", true);
        eo.finish();
    }
    if (const json* b = o.find("bunching")) {
        StrictObject bo(*b, "params.bunching");
        out.bunching.base_grid = int(bo.integer("base_grid", out.bunching.base_grid));
        out.bunching.fibre_grid = int(bo.integer("fibre_grid", out.bunching.fibre_grid));
        out.skip_bunching = bo.boolean("skip", false);
        bo.finish();
    }
    if (const json* d = o.find("disintegration")) {
        StrictObject dd(*d, "params.disintegration");
        auto& p = out.disintegration;
        p.base_n = int(dd.integer("base_n", p.base_n));
        p.fibre_n = int(dd.integer("fibre_n", p.fibre_n));
        p.n_bins = int(dd.integer("n_bins", p.n_bins));
        p.n_particles = int(dd.integer("n_particles", p.n_particles));
        p.n_steps = dd.integer("n_steps", p.n_steps);
        p.burn_in = dd.integer("burn_in", p.burn_in);
        p.min_samples = dd.integer("min_samples", p.min_samples);
        p.theta_fixed = dd.boolean("theta_fixed", false);
        p.theta0 = dd.number("theta0", 0.0);
        dd.finish();
    }
    if (const json* iv = o.find("invariance")) {
        StrictObject io(*iv, "params.invariance");
        out.invariance.n_pairs = int(io.integer("n_pairs", out.invariance.n_pairs));
        out.invariance.max_leaf_t = io.number("max_leaf_t", out.invariance.max_leaf_t);
        out.invariance.holonomy.tol = io.number("tol", out.invariance.holonomy.tol);
        io.finish();
    }
    if (const json* g = o.find("gates")) {
        StrictObject go(*g, "params.gates");
        auto& gg = out.gates;
        gg.gap_sigma = go.number("gap_sigma", gg.gap_sigma);
        gg.gap_abs = go.number("gap_abs", gg.gap_abs);
        gg.atom_threshold = go.number("atom_threshold", gg.atom_threshold);
        gg.atom_slack = go.number("atom_slack", gg.atom_slack);
        gg.atom_cell_fraction = go.number("atom_cell_fraction", gg.atom_cell_fraction);
        gg.invariance_gate_bins = go.number("invariance_gate_bins", gg.invariance_gate_bins);
        gg.heavy_slack = go.number("heavy_slack", gg.heavy_slack);
        go.finish();
    }
    if (const json* b = o.find("barycentre")) {
        StrictObject bo(*b, "params.barycentre");
        out.barycentre.tol = bo.number("tol", out.barycentre.tol);
        out.barycentre.min_samples = bo.integer("min_samples", out.barycentre.min_samples);
        bo.finish();
    }
    if (const json* h = o.find("holonomy")) {
        StrictObject ho(*h, "params.holonomy");
        out.holonomy_pairs = int(ho.integer("n_pairs", out.holonomy_pairs));
        out.holonomy_tol = ho.number("tol", out.holonomy_tol);
        out.holonomy_max_t = ho.number("max_leaf_t", out.holonomy_max_t);
        out.holonomy_sample_grid = int(ho.integer("sample_grid", out.holonomy_sample_grid));
        ho.finish();
    }
    if (const json* a = o.find("accessibility")) {
        StrictObject ao(*a, "params.accessibility");
        out.group.n_loops = int(ao.integer("n_loops", out.group.n_loops));
        out.group.max_period = int(ao.integer("max_period", out.group.max_period));
        out.group.search_radius = ao.number("search_radius", out.group.search_radius);
        out.group.closure_cap = int(ao.integer("closure_cap", out.group.closure_cap));
        out.group.closure_rounds = int(ao.integer("closure_rounds", out.group.closure_rounds));
        out.group.holonomy.tol = ao.number("tol", 1e-9);
        ao.finish();
    }
    if (const json* m = o.find("model")) {
        StrictObject mo(*m, "params.model");
        auto& am = out.affine_model;
        am.grid_n = int(mo.integer("grid_n", am.grid_n));
        am.fit_grid = int(mo.integer("fit_grid", am.fit_grid));
        am.defect_grid = int(mo.integer("defect_grid", am.defect_grid));
        am.beltrami_tol = mo.number("beltrami_tol", am.beltrami_tol);
        am.defect_gate = mo.number("defect_gate", am.defect_gate);
        am.a_const_gate = mo.number("a_const_gate", am.a_const_gate);
        am.integer_gate = mo.number("integer_gate", am.integer_gate);
        auto& mm = out.moebius_model;
        mm.sample_band = int(mo.integer("sample_band", mm.sample_band));
        mm.sample_lon = int(mo.integer("sample_lon", mm.sample_lon));
        mm.defect_grid = int(mo.integer("moebius_defect_grid", mm.defect_grid));
        mm.defect_gate = mo.number("moebius_defect_gate", mm.defect_gate);
        mm.enforce_defect_gate = mo.boolean("enforce_defect_gate", false);
        mo.finish();
    }
    o.finish();

    // resolved echo so every gate decision is traceable to a config value
    json echo;
    echo["exponents"] = {{"n_iter", out.exponents.n_iter},
                         {"n_orbits", out.exponents.n_orbits},
                         {"record_series", out.exponents.record_series}};
    echo["bunching"] = {{"base_grid", out.bunching.base_grid},
                        {"fibre_grid", out.bunching.fibre_grid},
                        {"skip", out.skip_bunching}};
    echo["disintegration"] = {{"base_n", out.disintegration.base_n},
                              {"fibre_n", out.disintegration.fibre_n},
                              {"n_bins", out.disintegration.n_bins},
                              {"n_particles", out.disintegration.n_particles},
                              {"n_steps", out.disintegration.n_steps},
                              {"burn_in", out.disintegration.burn_in},
                              {"min_samples", out.disintegration.min_samples},
                              {"theta_fixed", out.disintegration.theta_fixed},
                              {"theta0", out.disintegration.theta0}};
    echo["invariance"] = {{"n_pairs", out.invariance.n_pairs},
                          {"max_leaf_t", out.invariance.max_leaf_t},
                          {"tol", out.invariance.holonomy.tol}};
    echo["gates"] = {{"gap_sigma", out.gates.gap_sigma},
                     {"gap_abs", out.gates.gap_abs},
                     {"atom_threshold", out.gates.atom_threshold},
                     {"atom_slack", out.gates.atom_slack},
                     {"atom_cell_fraction", out.gates.atom_cell_fraction},
                     {"invariance_gate_bins", out.gates.invariance_gate_bins},
                     {"heavy_slack", out.gates.heavy_slack}};
    echo["barycentre"] = {{"tol", out.barycentre.tol},
                          {"min_samples", out.barycentre.min_samples}};
    echo["holonomy"] = {{"n_pairs", out.holonomy_pairs},
                        {"tol", out.holonomy_tol},
                        {"max_leaf_t", out.holonomy_max_t},
                        {"sample_grid", out.holonomy_sample_grid}};
    echo["accessibility"] = {{"n_loops", out.group.n_loops},
                             {"max_period", out.group.max_period},
                             {"search_radius", out.group.search_radius},
                             {"closure_cap", out.group.closure_cap},
                             {"closure_rounds", out.group.closure_rounds},
                             {"tol", out.group.holonomy.tol}};
    echo["model"] = {{"grid_n", out.affine_model.grid_n},
                     {"fit_grid", out.affine_model.fit_grid},
                     {"defect_grid", out.affine_model.defect_grid},
                     {"beltrami_tol", out.affine_model.beltrami_tol},
                     {"defect_gate", out.affine_model.defect_gate},
                     {"a_const_gate", out.affine_model.a_const_gate},
                     {"integer_gate", out.affine_model.integer_gate},
                     {"sample_band", out.moebius_model.sample_band},
                     {"sample_lon", out.moebius_model.sample_lon},
                     {"moebius_defect_grid", out.moebius_model.defect_grid},
                     {"moebius_defect_gate", out.moebius_model.defect_gate},
                     {"enforce_defect_gate", out.moebius_model.enforce_defect_gate}};
    out.echo = echo;
    return out;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::ConfigInvalid, "cannot write " + path.string());
    f << content;
}

std::string csv_row(std::initializer_list<double> vals) {
    std::string row;
    char buf[32];
    for (double v : vals) {
        if (!row.empty()) row.push_back(',');
        std::snprintf(buf, sizeof buf, "%.17g", v);
        row += buf;
    }
    row.push_back('\n');
    return row;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    StrictObject o(j, "config");
    long long version = o.integer("schema_version", 0);
    if (version != 1) throw Error(ErrorCode::ConfigInvalid, "config.schema_version must be 1");
    cfg.task = parse_task(o.str("task", ""));
    cfg.system = o.at("system");
    auto f = json_io::parse_system(cfg.system);  // full validation
    cfg.seed = std::uint64_t(o.integer("seed", 1));
    cfg.workers = int(o.integer("workers", 1));
    if (cfg.workers < 1 || cfg.workers > 256)
        throw Error(ErrorCode::ConfigInvalid, "workers must be in [1, 256]");
    cfg.out_dir = o.str("out_dir", "phlab_out");
    cfg.notes = o.str("notes", "");
    cfg.expected_verdict = o.str("expected_verdict", "");
    cfg.params = o.has("params") ? o.at("params") : json::object();

    auto resolved = resolve_params(cfg.task, cfg.params, cfg.seed, cfg.workers);
    o.finish();

    cfg.canonical = json{{"schema_version", 1},
                         {"task", task_name(cfg.task)},
                         {"system", json_io::system_to_json(f)},
                         {"seed", cfg.seed},
                         {"workers", cfg.workers},
                         {"out_dir", cfg.out_dir},
                         {"params", resolved.echo}};
    if (!cfg.notes.empty()) cfg.canonical["notes"] = cfg.notes;
    if (!cfg.expected_verdict.empty()) cfg.canonical["expected_verdict"] = cfg.expected_verdict;
    return cfg;
}

namespace {

void write_field_csv(const fs::path& dir, const projective::DisintegrationField& field,
                     std::vector<std::string>& artifacts) {
    std::string csv = "base_i,base_j,fib_i,fib_j,bin,mass\n";
    for (int cell = 0; cell < field.n_cells(); ++cell) {
        auto c = field.conditional(cell);
        if (c.samples == 0) continue;
        int fj = cell % field.fibre_n();
        int fi = (cell / field.fibre_n()) % field.fibre_n();
        int bj = (cell / (field.fibre_n() * field.fibre_n())) % field.base_n();
        int bi = cell / (field.fibre_n() * field.fibre_n() * field.base_n());
        for (int b = 0; b < field.n_bins(); ++b) {
            if (c.mass[b] == 0.0) continue;
            csv += csv_row({double(bi), double(bj), double(fi), double(fj), double(b), c.mass[b]});
        }
    }
    write_text(dir / "disintegration_field.csv", csv);
    artifacts.push_back("disintegration_field.csv");
    json header{{"schema_version", 1},
                {"base_n", field.base_n()},
                {"fibre_n", field.fibre_n()},
                {"n_bins", field.n_bins()},
                {"total_samples", field.total_samples()},
                {"seed", field.seed},
                {"base_marginal_chi2", field.base_marginal_chi2()}};
    write_text(dir / "disintegration_field.json", header.dump(2) + "\n");
    artifacts.push_back("disintegration_field.json");
}

void write_structure_csv(const fs::path& dir, const conformal::BarycentreField& field,
                         std::vector<std::string>& artifacts) {
    std::string csv = "base_i,base_j,fib_i,fib_j,tau_re,tau_im,valid\n";
    int fn = field.fibre_n, bnn = field.base_n;
    for (int cell = 0; cell < int(field.tau.size()); ++cell) {
        int fj = cell % fn;
        int fi = (cell / fn) % fn;
        int bj = (cell / (fn * fn)) % bnn;
        int bi = cell / (fn * fn * bnn);
        csv += csv_row({double(bi), double(bj), double(fi), double(fj), field.tau[cell].real(),
                        field.tau[cell].imag(), double(field.valid[cell])});
    }
    write_text(dir / "structure_field.csv", csv);
    artifacts.push_back("structure_field.csv");
    write_text(dir / "structure_field.json",
               json_io::barycentre_field_summary_to_json(field).dump(2) + "\n");
    artifacts.push_back("structure_field.json");
}

}  // namespace

RunReport run(const ExperimentConfig& config) {
    auto t0 = std::chrono::steady_clock::now();
    auto resolved = resolve_params(config.task, config.params, config.seed, config.workers);
    auto f = json_io::parse_system(config.system);

    fs::path dir = config.out_dir.empty() ? "phlab_out" : config.out_dir;
    if (const char* env = std::getenv("PHLAB_OUT")) dir = env;
    fs::create_directories(dir);

    RunReport report;
    json outputs;
    std::vector<std::string> warnings;

    switch (config.task) {
        case Task::Exponents: {
            std::vector<lyap::ConvergencePoint> series;
            auto est = lyap::centre_exponents(f, resolved.exponents,
                                              resolved.exponents.record_series ? &series : nullptr);
            outputs["estimate"] = json_io::exponent_estimate_to_json(est);
            if (!resolved.skip_bunching) {
                auto cert = lyap::certify_bunching(f, resolved.bunching);
                outputs["bunching"] = json_io::bunching_certificate_to_json(cert);
                if (!cert.passed) warnings.push_back("bunching certificate failed");
            }
            if (f.fibre_volume_preserving())
                outputs["symmetry_residual"] = lyap::check_symplectic_symmetry(est);
            if (!series.empty()) {
                std::string csv = "n,lambda_plus,lambda_minus,stderr_plus\n";
                for (const auto& pt : series)
                    csv += csv_row({double(pt.n), pt.lambda_plus, pt.lambda_minus, pt.stderr_plus});
                write_text(dir / "exponents_series.csv", csv);
                report.artifacts.push_back("exponents_series.csv");
            }
            break;
        }
        case Task::Holonomy: {
            Rng rng(config.seed);
            holonomy::HolonomyParams hp;
            hp.tol = resolved.holonomy_tol;
            hp.sample_grid = resolved.holonomy_sample_grid;
            std::string csv = "pair,kind,leaf_t,vx,vy,vz,hx,hy,hz\n";
            double max_translation_dev = 0.0, max_tail = 0.0, max_det_err = 0.0;
            int translations = 0;
            for (int i = 0; i < resolved.holonomy_pairs; ++i) {
                base::ToralPoint x{rng.uniform(), rng.uniform()};
                auto kind = (i % 2 == 0) ? base::LeafKind::Unstable : base::LeafKind::Stable;
                double t = (0.2 + 0.8 * rng.uniform()) * resolved.holonomy_max_t;
                if (rng.uniform() < 0.5) t = -t;
                base::ToralPoint y = base::leaf_point(f.base(), x, kind, t);
                auto h = holonomy::fibre_holonomy(f, x, y, kind, hp);
                max_tail = std::max(max_tail, h.tail_bound);
                if (h.translation) {
                    max_translation_dev = std::max(max_translation_dev, h.translation_max_dev);
                    ++translations;
                }
                for (const auto& [v, hv] : h.samples) {
                    if (std::holds_alternative<Vec2>(v)) {
                        auto a = std::get<Vec2>(v);
                        auto b = std::get<Vec2>(hv);
                        csv += csv_row({double(i), kind == base::LeafKind::Unstable ? 1.0 : 0.0,
                                        t, a.x, a.y, 0.0, b.x, b.y, 0.0});
                    } else {
                        auto a = std::get<fibred::SpherePoint>(v);
                        auto b = std::get<fibred::SpherePoint>(hv);
                        csv += csv_row({double(i), kind == base::LeafKind::Unstable ? 1.0 : 0.0,
                                        t, a.X, a.Y, a.Z, b.X, b.Y, b.Z});
                    }
                }
                fibred::SystemPoint p{x, f.random_fibre_point(rng)};
                auto dh = holonomy::derivative_holonomy(f, p, y, kind, hp);
                if (f.fibre_volume_preserving())
                    max_det_err = std::max(max_det_err, std::abs(dh.matrix.det() - 1.0));
            }
            write_text(dir / "holonomy_samples.csv", csv);
            report.artifacts.push_back("holonomy_samples.csv");
            outputs["n_pairs"] = resolved.holonomy_pairs;
            outputs["max_translation_deviation"] = max_translation_dev;
            outputs["translation_fits"] = translations;
            outputs["max_tail_bound"] = max_tail;
            outputs["max_derivative_det_error"] = max_det_err;
            break;
        }
        case Task::Classify:
        case Task::Uniformize: {
            projective::ClassifyConfig cc;
            cc.exponents = resolved.exponents;
            cc.bunching = resolved.bunching;
            cc.skip_bunching = resolved.skip_bunching;
            cc.disintegration = resolved.disintegration;
            cc.invariance = resolved.invariance;
            cc.barycentre = resolved.barycentre;
            cc.gates = resolved.gates;
            auto field = projective::empirical_disintegration(f, cc.disintegration);
            auto est = lyap::centre_exponents(f, cc.exponents);
            auto rep = projective::classify_from_field(f, field, est, cc);
            if (!cc.skip_bunching) {
                rep.bunching = lyap::certify_bunching(f, cc.bunching);
                rep.bunching_checked = true;
                if (!rep.bunching.passed) warnings.push_back("bunching certificate failed");
            }
            outputs["trichotomy"] = json_io::trichotomy_report_to_json(rep);
            write_text(dir / "trichotomy_report.json",
                       json_io::trichotomy_report_to_json(rep).dump(2) + "\n");
            report.artifacts.push_back("trichotomy_report.json");
            write_field_csv(dir, field, report.artifacts);
            if (rep.structure_field) write_structure_csv(dir, *rep.structure_field, report.artifacts);

            if (config.task == Task::Uniformize) {
                if (f.fibre_kind() == fibred::FibreKind::Torus) {
                    auto model = uniformize::extract_affine_model(f, rep, resolved.affine_model);
                    outputs["affine_model"] = json_io::affine_model_to_json(model);
                    std::string csv = "base_i,base_j,a_re,a_im,b_re,b_im,w1,w2\n";
                    for (int bi = 0; bi < model.base_n; ++bi)
                        for (int bj = 0; bj < model.base_n; ++bj) {
                            std::size_t c = std::size_t(bi) * model.base_n + bj;
                            csv += csv_row({double(bi), double(bj), model.a_cells[c].real(),
                                            model.a_cells[c].imag(), model.b_cells[c].real(),
                                            model.b_cells[c].imag(), model.w_model[c].x,
                                            model.w_model[c].y});
                        }
                    write_text(dir / "affine_model_cells.csv", csv);
                    report.artifacts.push_back("affine_model_cells.csv");
                    write_text(dir / "affine_model.json",
                               json_io::affine_model_to_json(model).dump(2) + "\n");
                    report.artifacts.push_back("affine_model.json");

                    // representative Beltrami grid and solution for the first cell
                    auto tau0 = model.tau;
                    auto grid = uniformize::BeltramiGrid::constant(
                        resolved.affine_model.grid_n, uniformize::mu_of_tau(
                            rep.structure_field->mean_tau));
                    uniformize::BeltramiSolveParams sp;
                    sp.tol = resolved.affine_model.beltrami_tol;
                    auto w = uniformize::solve_beltrami_periodic(grid, sp);
                    (void)tau0;
                    std::string mcsv = "ix,iy,mu_re,mu_im\n";
                    for (int iy = 0; iy < grid.n; ++iy)
                        for (int ix = 0; ix < grid.n; ++ix) {
                            auto m = grid.mu[std::size_t(iy) * grid.n + ix];
                            mcsv += csv_row({double(ix), double(iy), m.real(), m.imag()});
                        }
                    write_text(dir / "beltrami_mu.csv", mcsv);
                    report.artifacts.push_back("beltrami_mu.csv");
                    json wh{{"schema_version", 1},
                            {"n", w.n},
                            {"A", {w.A.real(), w.A.imag()}},
                            {"B", {w.B.real(), w.B.imag()}},
                            {"residual", w.residual},
                            {"normalization", "w(0)=0, w(1)=1"},
                            {"tau_re", uniformize::lattice_parameter(w).tau.real()},
                            {"tau_im", uniformize::lattice_parameter(w).tau.imag()}};
                    write_text(dir / "qc_map.json", wh.dump(2) + "\n");
                    report.artifacts.push_back("qc_map.json");
                    std::string wcsv = "ix,iy,w_re,w_im\n";
                    const int n = w.n;
                    for (int iy = 0; iy < n; iy += std::max(1, n / 32))
                        for (int ix = 0; ix < n; ix += std::max(1, n / 32)) {
                            auto val = w.value(uniformize::Complex{double(ix) / n, double(iy) / n});
                            wcsv += csv_row({double(ix), double(iy), val.real(), val.imag()});
                        }
                    write_text(dir / "qc_map.csv", wcsv);
                    report.artifacts.push_back("qc_map.csv");
                } else {
                    auto model = uniformize::extract_moebius_model(f, rep, resolved.moebius_model);
                    outputs["moebius_model"] = json_io::moebius_model_to_json(model);
                    write_text(dir / "moebius_model.json",
                               json_io::moebius_model_to_json(model).dump(2) + "\n");
                    report.artifacts.push_back("moebius_model.json");
                }
            }
            if (rep.verdict == projective::Verdict::Inconclusive) report.exit_code = 4;
            break;
        }
        case Task::BarycentreField: {
            auto field = projective::empirical_disintegration(f, resolved.disintegration);
            auto bf = conformal::barycentre_field(field, resolved.barycentre);
            outputs["summary"] = json_io::barycentre_field_summary_to_json(bf);
            write_field_csv(dir, field, report.artifacts);
            write_structure_csv(dir, bf, report.artifacts);
            break;
        }
        case Task::Accessibility: {
            Rng rng(config.seed);
            base::ToralPoint x{rng.uniform(), rng.uniform()};
            auto sample = holonomy::holonomy_group_sample(f, x, derive_seed(config.seed, 42),
                                                          resolved.group);
            outputs["group_sample"] = json_io::group_sample_to_json(sample);
            std::string csv = "e1,e2\n";
            for (const auto& e : sample.elements) csv += csv_row({e.x, e.y});
            write_text(dir / "group_elements.csv", csv);
            report.artifacts.push_back("group_elements.csv");
            break;
        }
    }

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json doc;
    doc["schema_version"] = 1;
    doc["task"] = task_name(config.task);
    doc["config"] = config.canonical;
    doc["config_hash"] = Sha1::of(config.canonical.dump());
    doc["timestamp"] = std::uint64_t(std::time(nullptr));
    doc["wall_seconds"] = wall;
    doc["outputs"] = outputs;
    doc["warnings"] = warnings;
    doc["artifacts"] = report.artifacts;
    report.document = doc;
    write_text(dir / "report.json", doc.dump(2) + "\n");
    report.artifacts.push_back("report.json");
    return report;
}

namespace {

json small_w_json() {
    return json{{"harmonics",
                 {{{"k", {1, 0}}, {"c1", {0.13, 0.0}}, {"c2", {0.0, 0.0}}},
                  {{"k", {0, 1}}, {"c1", {0.0, 0.05}}, {"c2", {0.07, 0.02}}}}}};
}

json cat_base() { return json{{"matrix", {{2, 1}, {1, 1}}}}; }

json affine_system(json L) {
    return json{{"schema_version", 1},
                {"base", cat_base()},
                {"fibre", {{"kind", "torus"}, {"spec", "affine"}, {"L", L}, {"w", small_w_json()}}}};
}

json classify_params() {
    return json{{"exponents", {{"n_iter", 1000000}, {"n_orbits", 32}}},
                {"disintegration",
                 {{"base_n", 8},
                  {"fibre_n", 8},
                  {"n_bins", 64},
                  {"n_particles", 16384},
                  {"n_steps", 4000},
                  {"burn_in", 1000}}},
                {"invariance", {{"n_pairs", 64}}}};
}

std::vector<Preset> build_presets() {
    std::vector<Preset> out;

    out.push_back({"affine_order3", "elliptic affine extension, L of order 3; zero exponents and "
                                    "an invariant conformal structure",
                   json{{"schema_version", 1},
                        {"task", "classify"},
                        {"system", affine_system(json{{-1, -1}, {1, 0}})},
                        {"seed", 101},
                        {"params", classify_params()},
                        {"expected_verdict", "ConformalStructure"}}});
    out.push_back({"affine_order4", "elliptic affine extension, L of order 4; tau field at i",
                   json{{"schema_version", 1},
                        {"task", "classify"},
                        {"system", affine_system(json{{0, -1}, {1, 0}})},
                        {"seed", 102},
                        {"params", classify_params()},
                        {"expected_verdict", "ConformalStructure"}}});
    out.push_back({"affine_order6", "elliptic affine extension, L of order 6; hexagonal tau field",
                   json{{"schema_version", 1},
                        {"task", "classify"},
                        {"system", affine_system(json{{0, -1}, {1, 1}})},
                        {"seed", 103},
                        {"params", classify_params()},
                        {"expected_verdict", "ConformalStructure"}}});
    out.push_back(
        {"affine_w0", "affine extension with w = 0: trivial holonomy group (negative control)",
         json{{"schema_version", 1},
              {"task", "accessibility"},
              {"system",
               json{{"schema_version", 1},
                    {"base", cat_base()},
                    {"fibre", {{"kind", "torus"}, {"spec", "affine"}, {"L", {{0, -1}, {1, 0}}}}}}},
              {"seed", 104},
              {"notes", "covering radius stays at the trivial-group value ~0.707"}}});
    out.push_back({"accessibility", "generic-w affine extension: holonomy group covers the torus",
                   json{{"schema_version", 1},
                        {"task", "accessibility"},
                        {"system", affine_system(json{{0, -1}, {1, 0}})},
                        {"seed", 105},
                        {"notes", "covering radius drops below 0.05 after closure"}}});

    json shear_system{
        {"schema_version", 1},
        {"base", cat_base()},
        {"fibre",
         {{"kind", "torus"},
          {"spec", "shear"},
          {"alpha", {{"harmonics", {{{"k", 1}, {"amp", 0.05}, {"phase", 0.0}}}}}},
          {"w", small_w_json()}}}};
    out.push_back({"shear", "unipotent shear extension carrying the invariant horizontal line field",
                   json{{"schema_version", 1},
                        {"task", "classify"},
                        {"system", shear_system},
                        {"seed", 106},
                        {"params", classify_params()},
                        {"expected_verdict", "LineField"}}});

    json moebius_system{
        {"schema_version", 1},
        {"base", cat_base()},
        {"fibre",
         {{"kind", "sphere"},
          {"spec", "moebius"},
          {"mode", "rotation"},
          {"axis", {0.28, -0.1, 0.954673911879687}},
          {"angle",
           {{"c0", 0.8}, {"harmonics", {{{"k", {1, 0}}, {"amp", 0.35}, {"phase", 0.2}}}}}}}}};
    out.push_back({"moebius_rotation",
                   "rotation-valued Moebius extension of the sphere; conformal structure at i "
                   "and an exactly Moebius model",
                   json{{"schema_version", 1},
                        {"task", "uniformize"},
                        {"system", moebius_system},
                        {"seed", 107},
                        {"params", classify_params()},
                        {"expected_verdict", "ConformalStructure"}}});

    json perturbed_system{
        {"schema_version", 1},
        {"base", cat_base()},
        {"fibre",
         {{"kind", "torus"},
          {"spec", "perturbed_affine"},
          {"L", {{0, -1}, {1, 0}}},
          {"w", small_w_json()},
          {"eps", 0.3},
          {"shear1", {{"harmonics", {{{"kt", 1}, {"kx", {1, 0}}, {"amp", 1.0}, {"phase", 0.0}}}}}},
          {"shear2",
           {{"harmonics", {{{"kt", 1}, {"kx", {0, 1}}, {"amp", 1.0}, {"phase", 0.5}}}}}}}}};
    out.push_back({"perturbed",
                   "transverse shear perturbation of the order-4 affine extension at eps = 0.3; "
                   "non-uniformly hyperbolic",
                   json{{"schema_version", 1},
                        {"task", "classify"},
                        {"system", perturbed_system},
                        {"seed", 108},
                        {"params", classify_params()},
                        {"expected_verdict", "DistinctExponents"}}});

    json perturbed_moebius_system{
        {"schema_version", 1},
        {"base", cat_base()},
        {"fibre",
         {{"kind", "sphere"},
          {"spec", "perturbed_moebius"},
          {"mode", "rotation"},
          {"axis", {0.2, 0.0, 0.9797958971132712}},
          {"angle", {{"c0", 0.9}, {"harmonics", {{{"k", {1, 0}}, {"amp", 0.3}, {"phase", 0.0}}}}}},
          {"eps", 0.2},
          {"twist_z", {{"coeffs", {0.0, 1.0}}}},
          {"twist_x", {{"coeffs", {0.3, 0.0, 1.0}}}}}}};
    out.push_back({"perturbed_moebius",
                   "latitude-twist perturbation of a rotation extension at eps = 0.2 "
                   "(exponent diagnostic)",
                   json{{"schema_version", 1},
                        {"task", "exponents"},
                        {"system", perturbed_moebius_system},
                        {"seed", 109},
                        {"params", json{{"exponents", {{"n_iter", 200000}, {"n_orbits", 16}}}}}}});
    return out;
}

}  // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> list = build_presets();
    return list;
}

const Preset& preset_by_name(const std::string& name) {
    std::string key = name;
    if (key.size() > 5 && key.substr(key.size() - 5) == ".json") key = key.substr(0, key.size() - 5);
    for (const auto& p : presets())
        if (p.name == key) return p;
    throw Error(ErrorCode::ConfigInvalid, "unknown preset '" + name + "'");
}

}  // namespace phlab::experiment
