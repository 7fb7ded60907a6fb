#include "phlab/json_io.hpp"

#include <set>

#include "phlab/errors.hpp"

namespace phlab::json_io {

using fibred::FibredSystem;

StrictObject::StrictObject(const json& j, const std::string& context)
    : j_(j), context_(context) {
    if (!j.is_object())
        throw Error(ErrorCode::ConfigInvalid, context + " must be a JSON object");
}

StrictObject::~StrictObject() noexcept(false) {
    if (!finished_ && !std::uncaught_exceptions()) finish();
}

bool StrictObject::has(const std::string& key) { return j_.contains(key); }

const json& StrictObject::at(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end())
        throw Error(ErrorCode::ConfigInvalid, context_ + ": missing key '" + key + "'");
    visited_.insert(key);
    return *it;
}

const json* StrictObject::find(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    visited_.insert(key);
    return &*it;
}

double StrictObject::number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number())
        throw Error(ErrorCode::ConfigInvalid, context_ + "." + key + " must be a number");
    return v->get<double>();
}

double StrictObject::require_number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number())
        throw Error(ErrorCode::ConfigInvalid, context_ + "." + key + " must be a number");
    return v.get<double>();
}

long long StrictObject::integer(const std::string& key, long long fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer())
        throw Error(ErrorCode::ConfigInvalid, context_ + "." + key + " must be an integer");
    return v->get<long long>();
}

std::string StrictObject::str(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string())
        throw Error(ErrorCode::ConfigInvalid, context_ + "." + key + " must be a string");
    return v->get<std::string>();
}

bool StrictObject::boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean())
        throw Error(ErrorCode::ConfigInvalid, context_ + "." + key + " must be a boolean");
    return v->get<bool>();
}

void StrictObject::finish() {
    finished_ = true;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
        if (!visited_.count(it.key()))
            throw Error(ErrorCode::ConfigInvalid,
                        context_ + ": unknown key '" + it.key() + "'");
    }
}

namespace {

std::array<std::array<long long, 2>, 2> parse_imat(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 ||
        !j[1].is_array() || j[1].size() != 2)
        throw Error(ErrorCode::ConfigInvalid, ctx + " must be a 2x2 integer matrix");
    std::array<std::array<long long, 2>, 2> m;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            if (!j[r][c].is_number_integer())
                throw Error(ErrorCode::ConfigInvalid, ctx + " entries must be integers");
            m[r][c] = j[r][c].get<long long>();
        }
    return m;
}

std::complex<double> parse_complex(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw Error(ErrorCode::ConfigInvalid, ctx + " must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::array<int, 2> parse_freq(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw Error(ErrorCode::ConfigInvalid, ctx + " must be an integer pair");
    return {j[0].get<int>(), j[1].get<int>()};
}

FourierMapT2 parse_fourier_map(const json& j, const std::string& ctx) {
    FourierMapT2 out;
    StrictObject o(j, ctx);
    if (const json* hs = o.find("harmonics")) {
        if (!hs->is_array()) throw Error(ErrorCode::ConfigInvalid, ctx + ".harmonics: array");
        for (std::size_t i = 0; i < hs->size(); ++i) {
            StrictObject h((*hs)[i], ctx + ".harmonics[" + std::to_string(i) + "]");
            FourierMapT2::Harmonic hm;
            hm.k = parse_freq(h.at("k"), ctx + ".k");
            if (h.has("c1")) hm.c1 = parse_complex(h.at("c1"), ctx + ".c1");
            if (h.has("c2")) hm.c2 = parse_complex(h.at("c2"), ctx + ".c2");
            h.finish();
            out.harmonics.push_back(hm);
        }
    }
    o.finish();
    return out;
}

json fourier_map_to_json(const FourierMapT2& w) {
    json out = json::object();
    json hs = json::array();
    for (const auto& h : w.harmonics) {
        hs.push_back({{"k", {h.k[0], h.k[1]}},
                      {"c1", {h.c1.real(), h.c1.imag()}},
                      {"c2", {h.c2.real(), h.c2.imag()}}});
    }
    out["harmonics"] = hs;
    return out;
}

Fourier1 parse_fourier1(const json& j, const std::string& ctx) {
    Fourier1 out;
    StrictObject o(j, ctx);
    if (const json* hs = o.find("harmonics")) {
        for (std::size_t i = 0; i < hs->size(); ++i) {
            StrictObject h((*hs)[i], ctx + "[" + std::to_string(i) + "]");
            Fourier1::Harmonic hm;
            hm.k = int(h.integer("k", 1));
            hm.amp = h.require_number("amp");
            hm.phase = h.number("phase", 0.0);
            h.finish();
            out.harmonics.push_back(hm);
        }
    }
    o.finish();
    return out;
}

json fourier1_to_json(const Fourier1& f) {
    json hs = json::array();
    for (const auto& h : f.harmonics)
        hs.push_back({{"k", h.k}, {"amp", h.amp}, {"phase", h.phase}});
    return json{{"harmonics", hs}};
}

CoupledShear parse_coupled_shear(const json& j, const std::string& ctx) {
    CoupledShear out;
    StrictObject o(j, ctx);
    if (const json* hs = o.find("harmonics")) {
        for (std::size_t i = 0; i < hs->size(); ++i) {
            StrictObject h((*hs)[i], ctx + "[" + std::to_string(i) + "]");
            CoupledShear::Harmonic hm;
            hm.kt = int(h.integer("kt", 1));
            if (h.has("kx")) hm.kx = parse_freq(h.at("kx"), ctx + ".kx");
            hm.amp = h.require_number("amp");
            hm.phase = h.number("phase", 0.0);
            h.finish();
            out.harmonics.push_back(hm);
        }
    }
    o.finish();
    return out;
}

json coupled_shear_to_json(const CoupledShear& s) {
    json hs = json::array();
    for (const auto& h : s.harmonics)
        hs.push_back(
            {{"kt", h.kt}, {"kx", {h.kx[0], h.kx[1]}}, {"amp", h.amp}, {"phase", h.phase}});
    return json{{"harmonics", hs}};
}

fibred::ScalarFourierT2 parse_scalar_fourier(const json& j, const std::string& ctx) {
    fibred::ScalarFourierT2 out;
    StrictObject o(j, ctx);
    out.c0 = o.number("c0", 0.0);
    if (const json* hs = o.find("harmonics")) {
        for (std::size_t i = 0; i < hs->size(); ++i) {
            StrictObject h((*hs)[i], ctx + "[" + std::to_string(i) + "]");
            fibred::ScalarFourierT2::Harmonic hm;
            hm.k = parse_freq(h.at("k"), ctx + ".k");
            hm.amp = h.require_number("amp");
            hm.phase = h.number("phase", 0.0);
            h.finish();
            out.harmonics.push_back(hm);
        }
    }
    o.finish();
    return out;
}

json scalar_fourier_to_json(const fibred::ScalarFourierT2& s) {
    json hs = json::array();
    for (const auto& h : s.harmonics)
        hs.push_back({{"k", {h.k[0], h.k[1]}}, {"amp", h.amp}, {"phase", h.phase}});
    return json{{"c0", s.c0}, {"harmonics", hs}};
}

ComplexFourierT2 parse_complex_fourier(const json& j, const std::string& ctx) {
    ComplexFourierT2 out;
    StrictObject o(j, ctx);
    if (const json* hs = o.find("harmonics")) {
        for (std::size_t i = 0; i < hs->size(); ++i) {
            StrictObject h((*hs)[i], ctx + "[" + std::to_string(i) + "]");
            ComplexFourierT2::Harmonic hm;
            hm.k = parse_freq(h.at("k"), ctx + ".k");
            hm.c = parse_complex(h.at("c"), ctx + ".c");
            h.finish();
            out.harmonics.push_back(hm);
        }
    }
    o.finish();
    return out;
}

json complex_fourier_to_json(const ComplexFourierT2& f) {
    json hs = json::array();
    for (const auto& h : f.harmonics)
        hs.push_back({{"k", {h.k[0], h.k[1]}}, {"c", {h.c.real(), h.c.imag()}}});
    return json{{"harmonics", hs}};
}

fibred::TwistProfile parse_twist(const json& j, const std::string& ctx) {
    fibred::TwistProfile out;
    StrictObject o(j, ctx);
    if (const json* cs = o.find("coeffs")) {
        for (const auto& c : *cs) {
            if (!c.is_number())
                throw Error(ErrorCode::ConfigInvalid, ctx + ".coeffs must be numbers");
            out.coeffs.push_back(c.get<double>());
        }
    }
    o.finish();
    return out;
}

json twist_to_json(const fibred::TwistProfile& t) { return json{{"coeffs", t.coeffs}}; }

fibred::MoebiusSpec parse_moebius_core(StrictObject& o, const std::string& ctx) {
    fibred::MoebiusSpec spec;
    std::string mode = o.str("mode", "rotation");
    if (mode == "rotation") {
        spec.mode = fibred::MoebiusSpec::Mode::Rotation;
        if (const json* ax = o.find("axis")) {
            if (!ax->is_array() || ax->size() != 3)
                throw Error(ErrorCode::ConfigInvalid, ctx + ".axis must have 3 entries");
            for (int i = 0; i < 3; ++i) spec.axis[i] = (*ax)[i].get<double>();
        }
        if (o.has("angle")) spec.angle = parse_scalar_fourier(o.at("angle"), ctx + ".angle");
    } else if (mode == "general") {
        spec.mode = fibred::MoebiusSpec::Mode::General;
        if (o.has("a")) spec.a = parse_complex_fourier(o.at("a"), ctx + ".a");
        if (o.has("b")) spec.b = parse_complex_fourier(o.at("b"), ctx + ".b");
        if (o.has("c")) spec.c = parse_complex_fourier(o.at("c"), ctx + ".c");
        if (o.has("d")) spec.d = parse_complex_fourier(o.at("d"), ctx + ".d");
    } else {
        throw Error(ErrorCode::ConfigInvalid, ctx + ".mode must be rotation or general");
    }
    return spec;
}

void moebius_core_to_json(const fibred::MoebiusSpec& spec, json& out) {
    if (spec.mode == fibred::MoebiusSpec::Mode::Rotation) {
        out["mode"] = "rotation";
        out["axis"] = {spec.axis[0], spec.axis[1], spec.axis[2]};
        out["angle"] = scalar_fourier_to_json(spec.angle);
    } else {
        out["mode"] = "general";
        out["a"] = complex_fourier_to_json(spec.a);
        out["b"] = complex_fourier_to_json(spec.b);
        out["c"] = complex_fourier_to_json(spec.c);
        out["d"] = complex_fourier_to_json(spec.d);
    }
}

}  // namespace

FibredSystem parse_system(const json& j) {
    StrictObject o(j, "system");
    long long version = o.integer("schema_version", 0);
    if (version != 1)
        throw Error(ErrorCode::ConfigInvalid, "system.schema_version must be 1");

    StrictObject b(o.at("base"), "system.base");
    auto base_mat = parse_imat(b.at("matrix"), "system.base.matrix");
    b.finish();
    auto g = base::make_hyperbolic_automorphism(base_mat);

    StrictObject fo(o.at("fibre"), "system.fibre");
    std::string spec_name = fo.str("spec", "");
    fibred::FibreSpec spec;
    if (spec_name == "affine") {
        fibred::AffineSpec s;
        s.L = fibred::make_elliptic(parse_imat(fo.at("L"), "fibre.L"));
        if (fo.has("w")) s.w = parse_fourier_map(fo.at("w"), "fibre.w");
        spec = s;
    } else if (spec_name == "shear") {
        fibred::ShearSpec s;
        if (fo.has("alpha")) s.alpha = parse_fourier1(fo.at("alpha"), "fibre.alpha");
        if (fo.has("w")) s.w = parse_fourier_map(fo.at("w"), "fibre.w");
        spec = s;
    } else if (spec_name == "perturbed_affine") {
        fibred::PerturbedAffineSpec s;
        s.core.L = fibred::make_elliptic(parse_imat(fo.at("L"), "fibre.L"));
        if (fo.has("w")) s.core.w = parse_fourier_map(fo.at("w"), "fibre.w");
        s.eps = fo.number("eps", 0.0);
        if (fo.has("shear1")) s.shear1 = parse_coupled_shear(fo.at("shear1"), "fibre.shear1");
        if (fo.has("shear2")) s.shear2 = parse_coupled_shear(fo.at("shear2"), "fibre.shear2");
        spec = s;
    } else if (spec_name == "moebius") {
        spec = parse_moebius_core(fo, "fibre");
    } else if (spec_name == "perturbed_moebius") {
        fibred::PerturbedMoebiusSpec s;
        s.core = parse_moebius_core(fo, "fibre");
        s.eps = fo.number("eps", 0.0);
        if (fo.has("twist_z")) s.twist_z = parse_twist(fo.at("twist_z"), "fibre.twist_z");
        if (fo.has("twist_x")) s.twist_x = parse_twist(fo.at("twist_x"), "fibre.twist_x");
        spec = s;
    } else {
        throw Error(ErrorCode::ConfigInvalid, "fibre.spec must be one of affine, shear, "
                                              "perturbed_affine, moebius, perturbed_moebius");
    }
    std::string kind = fo.str("kind", "");
    fo.finish();
    o.finish();

    FibredSystem f(g, spec);
    if (!kind.empty()) {
        bool sphere = (kind == "sphere");
        if (!sphere && kind != "torus")
            throw Error(ErrorCode::ConfigInvalid, "fibre.kind must be torus or sphere");
        if ((f.fibre_kind() == fibred::FibreKind::Sphere) != sphere)
            throw Error(ErrorCode::ConfigInvalid, "fibre.kind inconsistent with fibre.spec");
    }
    return f;
}

json system_to_json(const FibredSystem& f) {
    json out;
    out["schema_version"] = 1;
    const auto& e = f.base().entries;
    out["base"] = {{"matrix", {{e[0][0], e[0][1]}, {e[1][0], e[1][1]}}}};
    json fo;
    fo["kind"] = (f.fibre_kind() == fibred::FibreKind::Sphere) ? "sphere" : "torus";
    if (const auto* a = std::get_if<fibred::AffineSpec>(&f.spec())) {
        fo["spec"] = "affine";
        fo["L"] = {{a->L.entries[0][0], a->L.entries[0][1]},
                   {a->L.entries[1][0], a->L.entries[1][1]}};
        fo["w"] = fourier_map_to_json(a->w);
    } else if (const auto* s = std::get_if<fibred::ShearSpec>(&f.spec())) {
        fo["spec"] = "shear";
        fo["alpha"] = fourier1_to_json(s->alpha);
        fo["w"] = fourier_map_to_json(s->w);
    } else if (const auto* p = std::get_if<fibred::PerturbedAffineSpec>(&f.spec())) {
        fo["spec"] = "perturbed_affine";
        fo["L"] = {{p->core.L.entries[0][0], p->core.L.entries[0][1]},
                   {p->core.L.entries[1][0], p->core.L.entries[1][1]}};
        fo["w"] = fourier_map_to_json(p->core.w);
        fo["eps"] = p->eps;
        fo["shear1"] = coupled_shear_to_json(p->shear1);
        fo["shear2"] = coupled_shear_to_json(p->shear2);
    } else if (const auto* m = std::get_if<fibred::MoebiusSpec>(&f.spec())) {
        fo["spec"] = "moebius";
        moebius_core_to_json(*m, fo);
    } else if (const auto* pm = std::get_if<fibred::PerturbedMoebiusSpec>(&f.spec())) {
        fo["spec"] = "perturbed_moebius";
        moebius_core_to_json(pm->core, fo);
        fo["eps"] = pm->eps;
        fo["twist_z"] = twist_to_json(pm->twist_z);
        fo["twist_x"] = twist_to_json(pm->twist_x);
    }
    out["fibre"] = fo;
    return out;
}

json exponent_estimate_to_json(const lyap::ExponentEstimate& est) {
    return json{{"lambda_plus", est.lambda_plus},
                {"lambda_minus", est.lambda_minus},
                {"stderr_plus", est.stderr_plus},
                {"stderr_minus", est.stderr_minus},
                {"n_iter", est.n_iter},
                {"n_orbits", est.n_orbits},
                {"seed", est.seed},
                {"det_log_mean", est.det_log_mean},
                {"inter_orbit_spread", est.inter_orbit_spread},
                {"gap", est.gap()},
                {"symmetry_residual", lyap::check_symplectic_symmetry(est)}};
}

json bunching_certificate_to_json(const lyap::BunchingCertificate& cert) {
    return json{{"nu", cert.nu},
                {"nu_hat", cert.nu_hat},
                {"gamma", cert.gamma},
                {"gamma_hat", cert.gamma_hat},
                {"sup_sigma", cert.sup_sigma},
                {"margin", cert.margin},
                {"margin_hat", cert.margin_hat},
                {"fibre_bunching_margin", cert.fibre_bunching_margin},
                {"lipschitz_slack", cert.lipschitz_slack},
                {"adapted_frame", cert.adapted_frame},
                {"base_grid", cert.base_grid},
                {"fibre_grid", cert.fibre_grid},
                {"passed", cert.passed}};
}

json invariance_residuals_to_json(const projective::InvarianceResiduals& r) {
    return json{{"dynamics", r.dynamics},
                {"stable", r.stable},
                {"unstable", r.unstable},
                {"n_pairs", r.n_pairs},
                {"skipped", r.skipped}};
}

json barycentre_field_summary_to_json(const conformal::BarycentreField& field) {
    return json{{"base_n", field.base_n},
                {"fibre_n", field.fibre_n},
                {"n_valid", field.n_valid},
                {"oscillation", field.oscillation},
                {"mean_tau_re", field.mean_tau.real()},
                {"mean_tau_im", field.mean_tau.imag()}};
}

json trichotomy_report_to_json(const projective::TrichotomyReport& rep) {
    json out;
    out["verdict"] = projective::verdict_name(rep.verdict);
    out["line_field_count"] = rep.line_field_count;
    out["exponents"] = exponent_estimate_to_json(rep.exponents);
    if (rep.bunching_checked) out["bunching"] = bunching_certificate_to_json(rep.bunching);
    out["atoms"] = json{{"fraction_one", rep.atoms.fraction_one},
                        {"fraction_two", rep.atoms.fraction_two},
                        {"mean_top_mass", rep.atoms.mean_top_mass},
                        {"cells_considered", rep.atoms.cells_considered}};
    if (rep.invariance) out["invariance"] = invariance_residuals_to_json(*rep.invariance);
    if (rep.structure_field)
        out["structure_field"] = barycentre_field_summary_to_json(*rep.structure_field);
    out["area_preserving"] = rep.area_preserving;
    out["gap_centred_at_zero"] = rep.gap_centred_at_zero;
    out["angle_bin_width"] = rep.angle_bin_width;
    out["gates"] = json{{"gap_sigma", rep.gates.gap_sigma},
                        {"gap_abs", rep.gates.gap_abs},
                        {"atom_threshold", rep.gates.atom_threshold},
                        {"atom_slack", rep.gates.atom_slack},
                        {"atom_cell_fraction", rep.gates.atom_cell_fraction},
                        {"invariance_gate_bins", rep.gates.invariance_gate_bins},
                        {"heavy_slack", rep.gates.heavy_slack}};
    if (!rep.notes.empty()) out["notes"] = rep.notes;
    return out;
}

json affine_model_to_json(const uniformize::AffineModelReport& rep) {
    json out;
    out["L"] = {{rep.L[0][0], rep.L[0][1]}, {rep.L[1][0], rep.L[1][1]}};
    out["order"] = rep.order;
    out["trace"] = rep.trace;
    out["tau_re"] = rep.tau.real();
    out["tau_im"] = rep.tau.imag();
    out["tau_oscillation"] = rep.tau_oscillation;
    out["a_oscillation"] = rep.a_oscillation;
    out["max_abs_a_deviation"] = rep.max_abs_a_deviation;
    out["max_conjugacy_defect"] = rep.max_conjugacy_defect;
    out["max_beltrami_residual"] = rep.max_beltrami_residual;
    out["base_n"] = rep.base_n;
    return out;
}

json moebius_model_to_json(const uniformize::MoebiusModelReport& rep) {
    json out;
    out["base_n"] = rep.base_n;
    out["max_fit_defect"] = rep.max_fit_defect;
    out["naive_max_fit_defect"] = rep.naive_max_fit_defect;
    out["structure_max_fit_defect"] = rep.structure_max_fit_defect;
    out["cells_structure_selected"] = rep.cells_structure_selected;
    json cells = json::array();
    for (const auto& c : rep.cells)
        cells.push_back({{"a", {c.a.real(), c.a.imag()}},
                         {"b", {c.b.real(), c.b.imag()}},
                         {"c", {c.c.real(), c.c.imag()}},
                         {"d", {c.d.real(), c.d.imag()}}});
    out["cells"] = cells;
    return out;
}

json group_sample_to_json(const holonomy::HolonomyGroupSample& s) {
    return json{{"n_elements", s.elements.size()},
                {"covering_radius", s.covering_radius},
                {"radius_per_round", s.radius_per_round},
                {"n_loops", s.n_loops}};
}

}  // namespace phlab::json_io
