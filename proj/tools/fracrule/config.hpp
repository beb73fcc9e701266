#pragma once

#include <optional>
#include <string>
#include <vector>

#include "functions.hpp"
#include "json.hpp"

namespace fracrule::cli {

struct OutputSpec {
    std::string path;
    std::string format;  ///< json | csv | svg
    friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

/// One experiment invocation. Mirrors the command-line flags one to one; a
/// JSON config file uses the same field names.
struct ExperimentConfig {
    std::string experiment;
    std::string op = "rl";
    double alpha = 0.5;
    std::optional<double> base;  ///< defaults to the grid origin
    std::optional<GridSpec> grid;
    std::optional<std::string> f;
    std::optional<std::string> g;
    std::optional<std::string> w;
    std::optional<std::string> rule;  ///< converge: which rule to study
    std::optional<double> lambda;
    std::optional<double> x0;
    std::vector<double> h_values;
    std::optional<std::size_t> num_scales;
    std::optional<double> check_alpha;
    std::optional<double> check_coeff;
    std::size_t quad_points = 32;
    double burn_in_fraction = 0.05;
    std::vector<OutputSpec> outputs;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "derive",       "weierstrass",      "holder",       "hadamard",
        "verify-leibniz", "verify-chain",   "verify-remainder", "verify-scale",
        "verify-modified-chain", "converge"};
    return names;
}

nlohmann::json to_json(const ExperimentConfig& c);

/// Throws validation_error on unknown keys or wrongly typed values.
ExperimentConfig config_from_json(const nlohmann::json& j);

std::string format_grid(const GridSpec& g);

}  // namespace fracrule::cli
