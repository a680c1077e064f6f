#pragma once

#include <stdexcept>
#include <string>

namespace parkscan {

/// Unreadable or structurally hopeless input (e.g. >50% malformed lines).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad polygon, out-of-range parameter, missing path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Regression with too few usable points.
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A pipeline stage failed; message carries the stage name.
struct StageError : std::runtime_error {
    std::string stage;
    StageError(std::string stage_name, const std::string& what)
        : std::runtime_error(stage_name + ": " + what), stage(std::move(stage_name)) {}
};

}  // namespace parkscan
