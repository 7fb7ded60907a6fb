#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "phlab/errors.hpp"
#include "phlab/experiment.hpp"

namespace {

using phlab::Error;
using phlab::ErrorCode;
namespace experiment = phlab::experiment;
using nlohmann::json;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigInvalid:
        case ErrorCode::NotUnimodular:
        case ErrorCode::NotHyperbolic:
        case ErrorCode::NotElliptic:
        case ErrorCode::TrivialAction:
        case ErrorCode::PeriodTooLarge:
            return 2;
        case ErrorCode::GateInconclusive:
        case ErrorCode::NotConformalVerdict:
            return 4;
        default:
            return 3;  // numerical failure family
    }
}

json load_config(const std::string& path) {
    std::ifstream f(path);
    if (f) {
        json j;
        try {
            f >> j;
        } catch (const std::exception& e) {
            throw Error(ErrorCode::ConfigInvalid, std::string("JSON parse error: ") + e.what());
        }
        return j;
    }
    // fall back to a bundled preset name
    return experiment::preset_by_name(path).config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phlab: numerical laboratory for fibred partially hyperbolic skew-products"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    long long seed_override = -1;
    int workers_override = 0;

    auto* run_cmd = app.add_subcommand("run", "run an experiment config (file or preset name)");
    run_cmd->add_option("config", config_path, "config JSON path or preset name")->required();
    run_cmd->add_option("--out", out_dir, "output directory (overrides config)");
    run_cmd->add_option("--seed", seed_override, "seed override");
    run_cmd->add_option("--workers", workers_override, "worker count override");

    auto* presets_cmd = app.add_subcommand("presets", "list bundled scenario configs");
    std::string dump_dir;
    presets_cmd->add_option("--write", dump_dir, "write the preset JSON files to a directory");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "validate a config without running it");
    validate_cmd->add_option("config", validate_path, "config JSON path or preset name")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets_cmd->parsed()) {
            for (const auto& p : experiment::presets()) {
                std::cout << p.name << ": " << p.description;
                if (p.config.contains("expected_verdict"))
                    std::cout << " [expected: " << p.config["expected_verdict"].get<std::string>()
                              << "]";
                std::cout << "\n";
                if (!dump_dir.empty()) {
                    std::filesystem::create_directories(dump_dir);
                    std::ofstream f(std::filesystem::path(dump_dir) / (p.name + ".json"));
                    f << p.config.dump(2) << "\n";
                }
            }
            return 0;
        }
        if (validate_cmd->parsed()) {
            auto cfg = experiment::parse_config(load_config(validate_path));
            std::cout << "valid: task=" << experiment::task_name(cfg.task) << " seed=" << cfg.seed
                      << "\n";
            return 0;
        }
        if (run_cmd->parsed()) {
            json j = load_config(config_path);
            if (!out_dir.empty()) j["out_dir"] = out_dir;
            if (seed_override >= 0) j["seed"] = seed_override;
            if (workers_override > 0) j["workers"] = workers_override;
            auto cfg = experiment::parse_config(j);
            auto report = experiment::run(cfg);
            std::cout << report.document.dump(2) << "\n";
            return report.exit_code;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
