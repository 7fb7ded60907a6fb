#include "phlab/experiment.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "phlab/errors.hpp"
#include "phlab/sha1.hpp"

using namespace phlab;
using namespace phlab::experiment;
using nlohmann::json;

namespace {

json minimal_config(const std::string& task) {
    return json{{"schema_version", 1},
                {"task", task},
                {"system", preset_by_name("affine_order4").config["system"]},
                {"seed", 7},
                {"params",
                 {{"exponents", {{"n_iter", 2000}, {"n_orbits", 4}}},
                  {"bunching", {{"base_grid", 2}, {"fibre_grid", 8}}}}}};
}

struct TempDir {
    std::filesystem::path path;
    TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

json strip_volatile(json j) {
    j.erase("timestamp");
    j.erase("wall_seconds");
    return j;
}

}  // namespace

TEST_CASE("sha1 test vectors") {
    CHECK(Sha1::of("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
    CHECK(Sha1::of("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
    CHECK(Sha1::of("The quick brown fox jumps over the lazy dog") ==
          "2fd4e1c67a2d28fced849ee1bb76e7391b93eb12");
}

TEST_CASE("config validation") {
    SUBCASE("valid config parses") {
        auto cfg = parse_config(minimal_config("exponents"));
        CHECK(cfg.task == Task::Exponents);
        CHECK(cfg.seed == 7);
        CHECK(cfg.canonical["params"]["exponents"]["n_iter"] == 2000);
    }
    SUBCASE("unknown top-level key is rejected") {
        auto j = minimal_config("exponents");
        j["surprise"] = 1;
        CHECK_THROWS_AS(parse_config(j), Error);
    }
    SUBCASE("unknown nested key is rejected") {
        auto j = minimal_config("exponents");
        j["params"]["exponents"]["n_iters"] = 5;
        CHECK_THROWS_AS(parse_config(j), Error);
    }
    SUBCASE("unknown system key is rejected") {
        auto j = minimal_config("exponents");
        j["system"]["fibre"]["spice"] = "affine";
        CHECK_THROWS_AS(parse_config(j), Error);
    }
    SUBCASE("bad task and missing schema version") {
        auto j = minimal_config("exponents");
        j["task"] = "explode";
        CHECK_THROWS_AS(parse_config(j), Error);
        j = minimal_config("exponents");
        j.erase("schema_version");
        CHECK_THROWS_AS(parse_config(j), Error);
    }
    SUBCASE("inconsistent fibre kind is rejected") {
        auto j = minimal_config("exponents");
        j["system"]["fibre"]["kind"] = "sphere";
        CHECK_THROWS_AS(parse_config(j), Error);
    }
}

TEST_CASE("system JSON round trip preserves evaluation") {
    for (const auto& p : presets()) {
        auto f1 = json_io::parse_system(p.config["system"]);
        auto echoed = json_io::system_to_json(f1);
        auto f2 = json_io::parse_system(echoed);
        Rng rng(5);
        for (int i = 0; i < 50; ++i) {
            fibred::SystemPoint q{{rng.uniform(), rng.uniform()}, f1.random_fibre_point(rng)};
            auto a = f1.evaluate(q);
            auto b = f2.evaluate(q);
            CHECK(base::dist(a.x, b.x) == 0.0);
            CHECK(fibred::fibre_dist(a.v, b.v) == 0.0);
        }
    }
}

TEST_CASE("presets are bundled and valid") {
    CHECK(presets().size() >= 7);
    for (const auto& p : presets()) {
        CHECK_NOTHROW(parse_config(p.config));
    }
    CHECK_THROWS_AS(preset_by_name("not_a_preset"), Error);
    CHECK(&preset_by_name("shear.json") == &preset_by_name("shear"));
}

TEST_CASE("runner writes reports and artifacts deterministically") {
    TempDir dir("phlab_test_run");
    auto j = minimal_config("exponents");
    j["out_dir"] = (dir.path / "a").string();
    auto cfg = parse_config(j);
    auto rep1 = run(cfg);
    CHECK(rep1.exit_code == 0);
    CHECK(std::filesystem::exists(dir.path / "a" / "report.json"));
    CHECK(std::filesystem::exists(dir.path / "a" / "exponents_series.csv"));

    // identical config + seed => byte-identical report modulo volatile fields
    auto rep2 = run(parse_config(j));
    CHECK(strip_volatile(rep1.document).dump() == strip_volatile(rep2.document).dump());

    // different worker count cannot change the numbers
    j["out_dir"] = (dir.path / "c").string();
    j["workers"] = 4;
    auto rep3 = run(parse_config(j));
    CHECK(rep3.document["outputs"]["estimate"]["lambda_plus"] ==
          rep1.document["outputs"]["estimate"]["lambda_plus"]);

    // the hash is the sha1 of the canonical config dump
    CHECK(rep1.document["config_hash"] == Sha1::of(cfg.canonical.dump()));

    // CSV artifact parses as numbers
    std::ifstream csv(dir.path / "a" / "exponents_series.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "n,lambda_plus,lambda_minus,stderr_plus");
    double n, lp, lm, se;
    char comma;
    csv >> n >> comma >> lp >> comma >> lm >> comma >> se;
    CHECK(n >= 1000);
}

TEST_CASE("PHLAB_OUT overrides the output directory") {
    TempDir dir("phlab_test_env");
    setenv("PHLAB_OUT", (dir.path / "env_out").c_str(), 1);
    auto j = minimal_config("exponents");
    j["out_dir"] = (dir.path / "ignored").string();
    run(parse_config(j));
    unsetenv("PHLAB_OUT");
    CHECK(std::filesystem::exists(dir.path / "env_out" / "report.json"));
    CHECK(!std::filesystem::exists(dir.path / "ignored"));
}

TEST_CASE("holonomy and accessibility tasks produce their artifacts") {
    TempDir dir("phlab_test_tasks");
    auto j = minimal_config("holonomy");
    j["params"] = json{{"holonomy", {{"n_pairs", 6}, {"max_leaf_t", 0.3}}}};
    j["out_dir"] = (dir.path / "hol").string();
    auto rep = run(parse_config(j));
    CHECK(rep.document["outputs"]["max_translation_deviation"].get<double>() < 1e-6);
    CHECK(std::filesystem::exists(dir.path / "hol" / "holonomy_samples.csv"));

    auto a = minimal_config("accessibility");
    a["params"] = json{{"accessibility", {{"n_loops", 8}, {"closure_cap", 70000}}}};
    a["out_dir"] = (dir.path / "acc").string();
    auto arep = run(parse_config(a));
    CHECK(arep.document["outputs"]["group_sample"]["covering_radius"].get<double>() < 0.1);
    CHECK(std::filesystem::exists(dir.path / "acc" / "group_elements.csv"));
}
