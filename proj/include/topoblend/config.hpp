#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "topoblend/errors.hpp"
#include "topoblend/pipeline.hpp"

namespace topoblend {

/// Validated configuration document with all defaults materialized.
/// Structural equality and serialization operate on the normalized form.
struct Config {
    nlohmann::json doc;

    bool operator==(const Config& other) const { return doc == other.doc; }
};

/// Parse and validate a configuration. Schema violations raise ConfigError
/// carrying the JSON path of the offending node.
Config parse_config(const std::string& text);
std::string serialize_config(const Config& config, int indent = 2);

/// Materialize the blend problem: build fields and regions (images are loaded
/// relative to `base_dir`), init plans and solver settings.
BlendProblem build_problem(const Config& config,
                           const std::filesystem::path& base_dir = ".");

/// Output file names (empty string disables an output).
struct OutputPlan {
    std::string mesh, grid, diagram, report;
};
OutputPlan output_plan(const Config& config);

}  // namespace topoblend
