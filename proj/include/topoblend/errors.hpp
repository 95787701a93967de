#pragma once

#include <stdexcept>
#include <string>

namespace topoblend {

/// File-system failure (CLI exit code 4).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Schema violation in a configuration document (CLI exit code 2). Carries
/// the JSON path of the offending node.
struct ConfigError : std::runtime_error {
    std::string json_path;

    ConfigError(std::string path, const std::string& message)
        : std::runtime_error("config error at " + path + ": " + message),
          json_path(std::move(path)) {}
};

}  // namespace topoblend
