#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phlab/conformal.hpp"
#include "phlab/errors.hpp"
#include "phlab/experiment.hpp"
#include "phlab/holonomy.hpp"
#include "phlab/json_io.hpp"
#include "phlab/lyapunov.hpp"
#include "phlab/trichotomy.hpp"
#include "phlab/uniformize.hpp"

namespace py = pybind11;
using namespace phlab;
using nlohmann::json;

namespace {

fibred::FibredSystem system_from_json(const std::string& text) {
    return json_io::parse_system(json::parse(text));
}

class PySystem {
  public:
    explicit PySystem(const std::string& json_text) : f_(system_from_json(json_text)) {}

    std::pair<std::pair<double, double>, std::vector<double>> evaluate(
        double x1, double x2, const std::vector<double>& fibre) const {
        auto q = f_.evaluate({base::ToralPoint{x1, x2}, unpack(fibre)});
        return {{q.x.x1, q.x.x2}, pack(q.v)};
    }

    std::pair<std::pair<double, double>, std::vector<double>> invert(
        double x1, double x2, const std::vector<double>& fibre) const {
        auto q = f_.invert({base::ToralPoint{x1, x2}, unpack(fibre)});
        return {{q.x.x1, q.x.x2}, pack(q.v)};
    }

    std::vector<std::vector<double>> centre_jacobian(double x1, double x2,
                                                     const std::vector<double>& fibre) const {
        Mat2 m = f_.centre_jacobian({base::ToralPoint{x1, x2}, unpack(fibre)});
        return {{m.a, m.b}, {m.c, m.d}};
    }

    double fibre_area_jacobian(double x1, double x2, const std::vector<double>& fibre) const {
        return f_.fibre_area_jacobian({base::ToralPoint{x1, x2}, unpack(fibre)});
    }

    bool volume_preserving() const { return f_.fibre_volume_preserving(); }
    std::string kind() const {
        return f_.fibre_kind() == fibred::FibreKind::Sphere ? "sphere" : "torus";
    }
    const fibred::FibredSystem& get() const { return f_; }

  private:
    fibred::FibrePoint unpack(const std::vector<double>& v) const {
        if (f_.fibre_kind() == fibred::FibreKind::Torus) {
            if (v.size() != 2) throw Error(ErrorCode::ConfigInvalid, "torus fibre point needs 2");
            return Vec2{v[0], v[1]};
        }
        if (v.size() != 3) throw Error(ErrorCode::ConfigInvalid, "sphere fibre point needs 3");
        return fibred::SpherePoint{v[0], v[1], v[2]};
    }
    static std::vector<double> pack(const fibred::FibrePoint& v) {
        if (std::holds_alternative<Vec2>(v)) {
            auto t = std::get<Vec2>(v);
            return {t.x, t.y};
        }
        auto s = std::get<fibred::SpherePoint>(v);
        return {s.X, s.Y, s.Z};
    }

    fibred::FibredSystem f_;
};

std::string centre_exponents_py(const std::string& system_json, long long n_iter, int n_orbits,
                                std::uint64_t seed, int workers) {
    auto f = system_from_json(system_json);
    lyap::ExponentParams prm;
    prm.n_iter = n_iter;
    prm.n_orbits = n_orbits;
    prm.seed = seed;
    prm.workers = workers;
    auto est = lyap::centre_exponents(f, prm);
    return json_io::exponent_estimate_to_json(est).dump();
}

std::string certify_bunching_py(const std::string& system_json, int base_grid, int fibre_grid) {
    auto f = system_from_json(system_json);
    lyap::BunchingParams prm;
    prm.base_grid = base_grid;
    prm.fibre_grid = fibre_grid;
    return json_io::bunching_certificate_to_json(lyap::certify_bunching(f, prm)).dump();
}

std::vector<double> holonomy_translation_py(const std::string& system_json, double x1, double x2,
                                            double t, const std::string& kind, double tol) {
    auto f = system_from_json(system_json);
    base::ToralPoint x{x1, x2};
    auto k = (kind == "stable") ? base::LeafKind::Stable : base::LeafKind::Unstable;
    base::ToralPoint y = base::leaf_point(f.base(), x, k, t);
    holonomy::HolonomyParams prm;
    prm.tol = tol;
    auto h = holonomy::fibre_holonomy(f, x, y, k, prm);
    if (!h.translation)
        throw Error(ErrorCode::ConfigInvalid, "translation fits need a torus group extension");
    return {h.translation->x, h.translation->y, h.translation_max_dev};
}

std::complex<double> barycentre_py(const std::vector<double>& angles,
                                   const std::vector<double>& masses, double tol) {
    if (angles.size() != masses.size())
        throw Error(ErrorCode::ConfigInvalid, "angles and masses must have equal length");
    conformal::CircleMeasure m;
    for (std::size_t i = 0; i < angles.size(); ++i) m.atoms.push_back({angles[i], masses[i]});
    return conformal::barycentre(m, tol).w;
}

std::complex<double> invariant_structure_tau_py(
    const std::array<std::array<long long, 2>, 2>& entries) {
    return conformal::invariant_structure_of(fibred::make_elliptic(entries)).tau;
}

std::string solve_beltrami_py(int n, std::complex<double> mu_const, double tol) {
    uniformize::BeltramiSolveParams prm;
    prm.tol = tol;
    auto w = uniformize::solve_beltrami_periodic(uniformize::BeltramiGrid::constant(n, mu_const),
                                                 prm);
    auto tau = uniformize::lattice_parameter(w).tau;
    return json{{"A", {w.A.real(), w.A.imag()}},
                {"B", {w.B.real(), w.B.imag()}},
                {"residual", w.residual},
                {"iterations", w.iterations},
                {"tau", {tau.real(), tau.imag()}}}
        .dump();
}

std::string classify_py(const PySystem& sys, const std::string& params_json,
                        std::uint64_t seed, int workers) {
    json cfg{{"schema_version", 1},
             {"task", "classify"},
             {"system", json_io::system_to_json(sys.get())},
             {"seed", seed},
             {"workers", workers}};
    if (!params_json.empty()) cfg["params"] = json::parse(params_json);
    auto parsed = experiment::parse_config(cfg);
    // classification without touching the filesystem
    projective::ClassifyConfig cc;
    auto resolved = json::parse(parsed.canonical["params"].dump());
    cc.exponents.n_iter = resolved["exponents"]["n_iter"].get<long long>();
    cc.exponents.n_orbits = resolved["exponents"]["n_orbits"].get<int>();
    cc.exponents.seed = seed;
    cc.exponents.workers = workers;
    cc.bunching.base_grid = resolved["bunching"]["base_grid"].get<int>();
    cc.bunching.fibre_grid = resolved["bunching"]["fibre_grid"].get<int>();
    cc.bunching.workers = workers;
    cc.skip_bunching = resolved["bunching"]["skip"].get<bool>();
    auto& d = resolved["disintegration"];
    cc.disintegration.base_n = d["base_n"].get<int>();
    cc.disintegration.fibre_n = d["fibre_n"].get<int>();
    cc.disintegration.n_bins = d["n_bins"].get<int>();
    cc.disintegration.n_particles = d["n_particles"].get<int>();
    cc.disintegration.n_steps = d["n_steps"].get<long long>();
    cc.disintegration.burn_in = d["burn_in"].get<long long>();
    cc.disintegration.seed = derive_seed(seed, 1000001);
    cc.disintegration.workers = workers;
    auto rep = projective::classify_trichotomy(sys.get(), cc);
    return json_io::trichotomy_report_to_json(rep).dump();
}

std::string run_config_py(const std::string& config_json) {
    auto cfg = experiment::parse_config(json::parse(config_json));
    auto report = experiment::run(cfg);
    return report.document.dump();
}

std::vector<std::pair<std::string, std::string>> presets_py() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& p : experiment::presets()) out.emplace_back(p.name, p.config.dump());
    return out;
}

}  // namespace

PYBIND11_MODULE(_phlab, m) {
    m.doc() = "Numerical laboratory for fibred partially hyperbolic skew-products";

    py::register_exception<Error>(m, "PhlabError");

    py::class_<PySystem>(m, "FibredSystem")
        .def(py::init<const std::string&>(), py::arg("system_json"))
        .def("evaluate", &PySystem::evaluate, py::arg("x1"), py::arg("x2"), py::arg("fibre"))
        .def("invert", &PySystem::invert, py::arg("x1"), py::arg("x2"), py::arg("fibre"))
        .def("centre_jacobian", &PySystem::centre_jacobian, py::arg("x1"), py::arg("x2"),
             py::arg("fibre"))
        .def("fibre_area_jacobian", &PySystem::fibre_area_jacobian, py::arg("x1"), py::arg("x2"),
             py::arg("fibre"))
        .def("volume_preserving", &PySystem::volume_preserving)
        .def("kind", &PySystem::kind);

    m.def("centre_exponents", &centre_exponents_py, py::arg("system_json"),
          py::arg("n_iter") = 100000, py::arg("n_orbits") = 8, py::arg("seed") = 1,
          py::arg("workers") = 1, "Centre Lyapunov exponents, JSON record");
    m.def("certify_bunching", &certify_bunching_py, py::arg("system_json"),
          py::arg("base_grid") = 8, py::arg("fibre_grid") = 64);
    m.def("holonomy_translation", &holonomy_translation_py, py::arg("system_json"), py::arg("x1"),
          py::arg("x2"), py::arg("t"), py::arg("kind") = "unstable", py::arg("tol") = 1e-10,
          "Best-fit translation (tx, ty, max_dev) of a leafwise holonomy");
    m.def("barycentre", &barycentre_py, py::arg("angles"), py::arg("masses"),
          py::arg("tol") = 1e-12, "Conformal barycentre of a circle measure, disc model");
    m.def("invariant_structure_tau", &invariant_structure_tau_py, py::arg("L"),
          "Fixed point in H of an elliptic SL(2,Z) action");
    m.def("solve_beltrami", &solve_beltrami_py, py::arg("n"), py::arg("mu"),
          py::arg("tol") = 1e-10, "Solve the periodic Beltrami equation for constant mu");
    m.def("classify", &classify_py, py::arg("system"), py::arg("params_json") = "",
          py::arg("seed") = 1, py::arg("workers") = 1, "Trichotomy report as JSON");
    m.def("run_config", &run_config_py, py::arg("config_json"),
          "Run a full experiment config; writes artifacts and returns the report JSON");
    m.def("presets", &presets_py, "Bundled scenario configs as (name, config_json) pairs");
}
