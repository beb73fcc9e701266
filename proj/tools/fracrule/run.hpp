#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"
#include "json.hpp"

namespace fracrule::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_runtime_error = 1;
inline constexpr int exit_validation_error = 2;

/// Everything an experiment produced, before it is written anywhere.
struct Outcome {
    nlohmann::json content;  ///< deterministic payload; digest is computed over this
    std::string csv;
    std::string svg;
};

/// Runs the experiment without touching the filesystem. Throws
/// validation_error for bad configs, other exceptions for runtime failures.
Outcome execute(const ExperimentConfig& cfg);

/// Full front end: validate, compute, write declared outputs (or print JSON
/// to `out` when none are declared). Returns the process exit status.
int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace fracrule::cli
