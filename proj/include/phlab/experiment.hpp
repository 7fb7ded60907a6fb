#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phlab/json_io.hpp"

namespace phlab::experiment {

using nlohmann::json;

enum class Task { Exponents, Holonomy, Classify, BarycentreField, Uniformize, Accessibility };

const char* task_name(Task t);

struct ExperimentConfig {
    Task task = Task::Exponents;
    json system;           // validated system subdocument
    json params;           // task parameters, schema-checked
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out_dir;   // empty -> "phlab_out"
    std::string notes;
    std::string expected_verdict;
    json canonical;        // normalised echo of the full config
};

// Parses and validates; throws ConfigInvalid on any violation.
ExperimentConfig parse_config(const json& j);

struct RunReport {
    json document;       // full report (echo, hash, outputs, warnings)
    int exit_code = 0;   // 0 ok, 4 gate inconclusive
    std::vector<std::string> artifacts;
};

// Executes the task and writes report + artifacts under the output directory
// (config out_dir, overridden by the PHLAB_OUT environment variable).
RunReport run(const ExperimentConfig& config);

struct Preset {
    std::string name;
    std::string description;
    json config;
};

const std::vector<Preset>& presets();
const Preset& preset_by_name(const std::string& name);

}  // namespace phlab::experiment
