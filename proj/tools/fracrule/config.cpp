#include "config.hpp"

#include <charconv>
#include <set>

namespace fracrule::cli {

namespace {

std::string shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

template <typename T>
T get_as(const nlohmann::json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("config field '") + key + "': " + e.what());
    }
}

template <typename T>
void get_opt(const nlohmann::json& j, const char* key, std::optional<T>& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = get_as<T>(j, key);
}

}  // namespace

std::string format_grid(const GridSpec& g) {
    return shortest(g.a) + ":" + shortest(g.h) + ":" + std::to_string(g.n);
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["experiment"] = c.experiment;
    j["op"] = c.op;
    j["alpha"] = c.alpha;
    if (c.base) j["base"] = *c.base;
    if (c.grid) j["grid"] = format_grid(*c.grid);
    if (c.f) j["f"] = *c.f;
    if (c.g) j["g"] = *c.g;
    if (c.w) j["w"] = *c.w;
    if (c.rule) j["rule"] = *c.rule;
    if (c.lambda) j["lambda"] = *c.lambda;
    if (c.x0) j["x0"] = *c.x0;
    if (!c.h_values.empty()) j["h_values"] = c.h_values;
    if (c.num_scales) j["num_scales"] = *c.num_scales;
    if (c.check_alpha) j["check_alpha"] = *c.check_alpha;
    if (c.check_coeff) j["check_coeff"] = *c.check_coeff;
    j["quad_points"] = c.quad_points;
    j["burn_in_fraction"] = c.burn_in_fraction;
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& o : c.outputs) outs.push_back({{"path", o.path}, {"format", o.format}});
    j["outputs"] = outs;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw validation_error("config must be a JSON object");
    static const std::set<std::string> known = {
        "experiment", "op",          "alpha",       "base",        "grid",
        "f",          "g",           "w",           "rule",        "lambda",
        "x0",         "h_values",    "num_scales",  "check_alpha", "check_coeff",
        "quad_points", "burn_in_fraction", "outputs"};
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw validation_error("unknown config field '" + key + "'");
    }

    ExperimentConfig c;
    if (j.contains("experiment")) c.experiment = get_as<std::string>(j, "experiment");
    if (j.contains("op")) c.op = get_as<std::string>(j, "op");
    if (j.contains("alpha")) c.alpha = get_as<double>(j, "alpha");
    get_opt(j, "base", c.base);
    if (j.contains("grid")) c.grid = parse_grid(get_as<std::string>(j, "grid"));
    get_opt(j, "f", c.f);
    get_opt(j, "g", c.g);
    get_opt(j, "w", c.w);
    get_opt(j, "rule", c.rule);
    get_opt(j, "lambda", c.lambda);
    get_opt(j, "x0", c.x0);
    if (j.contains("h_values")) c.h_values = get_as<std::vector<double>>(j, "h_values");
    get_opt(j, "num_scales", c.num_scales);
    get_opt(j, "check_alpha", c.check_alpha);
    get_opt(j, "check_coeff", c.check_coeff);
    if (j.contains("quad_points")) c.quad_points = get_as<std::size_t>(j, "quad_points");
    if (j.contains("burn_in_fraction")) c.burn_in_fraction = get_as<double>(j, "burn_in_fraction");
    if (j.contains("outputs")) {
        const auto& outs = j.at("outputs");
        if (!outs.is_array()) throw validation_error("config field 'outputs' must be an array");
        for (const auto& o : outs) {
            c.outputs.push_back({get_as<std::string>(o, "path"), get_as<std::string>(o, "format")});
        }
    }
    return c;
}

}  // namespace fracrule::cli
