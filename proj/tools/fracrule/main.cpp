#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "config.hpp"
#include "run.hpp"

using namespace fracrule::cli;

namespace {

/// Flag values; applied over the config file only where a flag was given.
struct Flags {
    std::string config_path;
    std::string op;
    double alpha = 0.0;
    double base = 0.0;
    std::string grid;
    std::string f, g, w, weierstrass, rule;
    double lambda = 0.0;
    double x0 = 0.0;
    std::vector<double> h_values;
    std::size_t num_scales = 0;
    double check_alpha = 0.0;
    double check_coeff = 0.0;
    std::size_t quad_points = 0;
    double burn_in_fraction = 0.0;
    std::string json_out, csv_out, svg_out;
};

struct Options {
    std::map<std::string, CLI::Option*> by_name;
};

void add_flags(CLI::App& sub, Flags& fl, Options& opts) {
    auto add = [&](const std::string& name, auto& target, const std::string& help) {
        opts.by_name[name] = sub.add_option(name, target, help);
    };
    add("--config", fl.config_path, "JSON config file; flags override its fields");
    add("--op", fl.op, "operator: rl | jumarie | local");
    add("--alpha", fl.alpha, "fractional order in (0, 1]");
    add("--base", fl.base, "lower terminal (must equal the grid origin)");
    add("--grid", fl.grid, "grid as a:h:n");
    add("--f", fl.f, "function spec (power:p, weierstrass:a:b:n, sin, cos, exp, identity, constant:c)");
    add("--g", fl.g, "second factor for verify-leibniz");
    add("--w", fl.w, "inner function for verify-chain / verify-remainder");
    add("--weierstrass", fl.weierstrass, "shorthand for --f weierstrass:alpha:b:n_terms");
    add("--rule", fl.rule, "converge: leibniz | chain | remainder | scale | modified-chain");
    add("--lambda", fl.lambda, "scale factor for verify-scale / verify-modified-chain");
    add("--x0", fl.x0, "evaluation point (t0 for hadamard)");
    opts.by_name["--h-values"] =
        sub.add_option("--h-values", fl.h_values, "step sizes, strictly decreasing")
            ->delimiter(',');
    add("--num-scales", fl.num_scales, "dyadic scales for holder");
    add("--check-alpha", fl.check_alpha, "holder: exponent to verify directly");
    add("--check-coeff", fl.check_coeff, "holder: constant A to verify directly");
    add("--quad-points", fl.quad_points, "Gauss-Legendre nodes for g2");
    add("--burn-in-fraction", fl.burn_in_fraction, "leading fraction of points excluded from norms");
    add("--json", fl.json_out, "write the JSON report here");
    add("--csv", fl.csv_out, "write the CSV table here");
    add("--svg", fl.svg_out, "write the SVG chart here");
}

ExperimentConfig assemble(const std::string& experiment, const Flags& fl, const Options& opts) {
    auto given = [&](const char* name) { return opts.by_name.at(name)->count() > 0; };

    ExperimentConfig c;
    if (given("--config")) {
        std::ifstream in(fl.config_path);
        if (!in) throw validation_error("cannot read config '" + fl.config_path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw validation_error(std::string("malformed config: ") + e.what());
        }
        c = config_from_json(j);
    }
    if (experiment != "run") c.experiment = experiment;
    if (given("--op")) c.op = fl.op;
    if (given("--alpha")) c.alpha = fl.alpha;
    if (given("--base")) c.base = fl.base;
    if (given("--grid")) c.grid = parse_grid(fl.grid);
    if (given("--f")) c.f = fl.f;
    if (given("--weierstrass")) c.f = "weierstrass:" + fl.weierstrass;
    if (given("--g")) c.g = fl.g;
    if (given("--w")) c.w = fl.w;
    if (given("--rule")) c.rule = fl.rule;
    if (given("--lambda")) c.lambda = fl.lambda;
    if (given("--x0")) c.x0 = fl.x0;
    if (given("--h-values")) c.h_values = fl.h_values;
    if (given("--num-scales")) c.num_scales = fl.num_scales;
    if (given("--check-alpha")) c.check_alpha = fl.check_alpha;
    if (given("--check-coeff")) c.check_coeff = fl.check_coeff;
    if (given("--quad-points")) c.quad_points = fl.quad_points;
    if (given("--burn-in-fraction")) c.burn_in_fraction = fl.burn_in_fraction;
    if (given("--json") || given("--csv") || given("--svg")) {
        c.outputs.clear();
        if (given("--json")) c.outputs.push_back({fl.json_out, "json"});
        if (given("--csv")) c.outputs.push_back({fl.csv_out, "csv"});
        if (given("--svg")) c.outputs.push_back({fl.svg_out, "svg"});
    }
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracrule: fractional derivative operators and rule checks"};
    app.require_subcommand(1);

    Flags flags;
    std::map<std::string, Options> options;
    std::map<std::string, CLI::App*> subs;
    std::vector<std::string> names = experiment_names();
    names.push_back("run");
    for (const auto& name : names) {
        CLI::App* sub = app.add_subcommand(
            name, name == "run" ? "run the experiment named in --config" : "experiment " + name);
        add_flags(*sub, flags, options[name]);
        subs[name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_validation_error;
    }

    for (const auto& name : names) {
        if (!subs[name]->parsed()) continue;
        ExperimentConfig cfg;
        try {
            cfg = assemble(name, flags, options[name]);
            if (name == "run" && cfg.experiment.empty()) {
                throw validation_error("run needs a config with an 'experiment' field");
            }
        } catch (const validation_error& e) {
            std::cerr << "fracrule: invalid configuration: " << e.what() << '\n';
            return exit_validation_error;
        }
        return run(cfg, std::cout, std::cerr);
    }
    return exit_validation_error;
}
