#pragma once

// Serialization of reports: JSON (content + digest + metadata), CSV, SVG.

#include <filesystem>
#include <string>
#include <vector>

#include "fracrule/analysis.hpp"
#include "fracrule/rules.hpp"
#include "json.hpp"

namespace fracrule::cli {

nlohmann::json to_json(const RuleReport& r);
nlohmann::json to_json(const ConvergenceReport& c);
nlohmann::json to_json(const HolderEstimate& e);

/// Shortest round-trip decimal form of v.
std::string format_real(double v);

/// RFC 4180 style table with a header row and LF line endings.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns);

std::string to_csv(const RuleReport& r);         ///< x,residual
std::string to_csv(const ConvergenceReport& c);  ///< h,sup_norm
std::string to_csv(const HolderEstimate& e);     ///< h,oscillation

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<double> y;
    bool log_x = false;
    bool log_y = false;
};

/// Static SVG 1.1 line chart; no external assets.
std::string to_svg(const Chart& chart);

Chart chart_for(const RuleReport& r);
Chart chart_for(const ConvergenceReport& c);
Chart chart_for(const HolderEstimate& e);

/// "sha256:<hex>" over the compact dump of content.
std::string content_digest(const nlohmann::json& content);

/// Adds content_digest and a metadata block (excluded from the digest).
nlohmann::json seal(nlohmann::json content);

/// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace fracrule::cli
