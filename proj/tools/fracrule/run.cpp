#include "run.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>

#include "fracrule/analysis.hpp"
#include "fracrule/operators.hpp"
#include "fracrule/rules.hpp"
#include "report.hpp"

namespace fracrule::cli {

namespace {

std::vector<double> points_of(const Grid& g) {
    std::vector<double> x(g.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = g.point(i);
    return x;
}

/// Validated view of a config; constructing it performs every check that
/// must happen before computation.
struct Plan {
    const ExperimentConfig& cfg;
    std::string experiment;
    OperatorKind kind = OperatorKind::RiemannLiouvilleGL;
    std::optional<FractionalOrder> order;
    std::optional<Grid> grid;
    std::optional<NamedFunction> f, g, w;
    std::vector<double> study_h;

    explicit Plan(const ExperimentConfig& c) : cfg(c) {
        try {
            validate();
        } catch (const validation_error&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw validation_error(e.what());
        } catch (const std::domain_error& e) {
            throw validation_error(e.what());
        }
    }

    [[nodiscard]] OperatorSpec spec_for(const Grid& gr) const {
        return {kind, *order, gr.a()};
    }

    [[nodiscard]] Grid grid_for(double h) const {
        return grid_over(grid->a(), grid->back(), h);
    }

    /// The experiment named by `rule` as a function of the step.
    [[nodiscard]] std::function<RuleReport(double)> rule_experiment(const std::string& rule) const {
        RuleOptions opt;
        opt.burn_in_fraction = cfg.burn_in_fraction;
        opt.quad_points = cfg.quad_points;
        if (rule == "leibniz") {
            return [this, opt](double h) {
                const Grid gr = grid_for(h);
                return leibniz_defect(sample(f->value, gr, f->spec), sample(g->value, gr, g->spec),
                                      spec_for(gr), opt);
            };
        }
        if (rule == "chain") {
            return [this, opt](double h) {
                const Grid gr = grid_for(h);
                return theorem_chain_residual(f->value, f->first_derivative(),
                                              sample(w->value, gr, w->spec), spec_for(gr), cfg.x0,
                                              opt);
            };
        }
        if (rule == "remainder") {
            return [this, opt](double h) {
                const Grid gr = grid_for(h);
                return remainder_vanishing_check(f->second_derivative(),
                                                 sample(w->value, gr, w->spec), spec_for(gr),
                                                 *cfg.x0, opt);
            };
        }
        if (rule == "scale") {
            return [this, opt](double h) {
                const Grid gr = grid_for(h);
                return scale_property_residual(f->value, *cfg.lambda, spec_for(gr), gr, opt);
            };
        }
        return [this, opt](double h) {
            const Grid gr = grid_for(h);
            return modified_chain_residual(f->value, *cfg.lambda, spec_for(gr), gr, opt);
        };
    }

private:
    void require(bool cond, const std::string& msg) const {
        if (!cond) throw validation_error(experiment + ": " + msg);
    }

    void validate() {
        experiment = cfg.experiment;
        const auto& names = experiment_names();
        if (std::find(names.begin(), names.end(), experiment) == names.end()) {
            throw validation_error("unknown experiment '" + experiment + "'");
        }
        for (const auto& o : cfg.outputs) {
            require(o.format == "json" || o.format == "csv" || o.format == "svg",
                    "unsupported output format '" + o.format + "'");
            require(!o.path.empty(), "empty output path");
        }
        require(cfg.quad_points >= 2, "quad_points must be at least 2");
        require(cfg.burn_in_fraction >= 0.0 && cfg.burn_in_fraction < 1.0,
                "burn_in_fraction must lie in [0, 1)");

        require(cfg.grid.has_value(), "a grid (a:h:n) is required");
        grid = Grid(cfg.grid->a, cfg.grid->h, cfg.grid->n);

        kind = operator_kind_from_string(cfg.op);
        order = FractionalOrder(cfg.alpha);
        if (cfg.base) {
            require(*cfg.base == grid->a(), "operator base must equal the grid origin");
        }

        if (cfg.f) f = parse_function(*cfg.f);
        if (cfg.g) g = parse_function(*cfg.g);
        if (cfg.w) w = parse_function(*cfg.w);

        std::string rule;
        if (experiment == "converge") {
            require(cfg.rule.has_value(), "--rule is required");
            rule = *cfg.rule;
            require(rule == "leibniz" || rule == "chain" || rule == "remainder" ||
                        rule == "scale" || rule == "modified-chain",
                    "unknown rule '" + rule + "'");
            require(cfg.h_values.size() >= 3, "at least three --h-values are required");
        } else if (experiment.starts_with("verify-")) {
            rule = experiment.substr(7);
        }

        if (experiment == "derive") {
            require(f.has_value(), "--f is required");
            if (kind == OperatorKind::LocalQuotient) require(cfg.x0.has_value(), "--x0 is required");
        } else if (experiment == "weierstrass") {
            require(f.has_value() && f->spec.starts_with("weierstrass:"),
                    "a weierstrass function is required");
        } else if (experiment == "holder") {
            require(f.has_value(), "--f or --weierstrass is required");
            require(cfg.check_alpha.has_value() == cfg.check_coeff.has_value(),
                    "--check-alpha and --check-coeff go together");
            const std::size_t scales =
                cfg.num_scales.value_or(max_scales_for(grid->size()));
            require(scales >= 4, "at least 4 scales are required");
            require(grid->size() >= (std::size_t{1} << std::min<std::size_t>(scales, 62)),
                    "grid too small for the requested number of scales");
        } else if (experiment == "hadamard") {
            require(f.has_value(), "--f is required");
            require(f->d1 && f->d2, "f needs first and second derivatives");
            require(cfg.x0.has_value(), "--x0 (t0) is required");
            require(*cfg.x0 >= grid->a() && *cfg.x0 <= grid->back(), "t0 outside the grid");
        }

        if (!rule.empty()) {
            require(kind != OperatorKind::LocalQuotient,
                    "rule checks need a grid operator (rl or jumarie)");
            require(f.has_value(), "--f is required");
            if (rule == "leibniz") {
                require(g.has_value(), "--g is required");
            } else if (rule == "chain") {
                require(w.has_value(), "--w is required");
                require(f->d1.has_value(), "f needs a first derivative");
            } else if (rule == "remainder") {
                require(w.has_value(), "--w is required");
                require(cfg.x0.has_value(), "--x0 is required");
                require(f->d2.has_value(), "f needs a second derivative");
            } else {
                require(cfg.lambda.has_value() && *cfg.lambda > 0.0, "--lambda > 0 is required");
                require(grid->a() == 0.0, "the scale identity needs lower terminal 0");
            }

            study_h = cfg.h_values;
            if (study_h.empty()) {
                const double h = grid->h();
                study_h = {4.0 * h, 2.0 * h, h};
            }
            require(study_h.size() >= 3, "at least three step sizes are required");
            for (std::size_t j = 0; j < study_h.size(); ++j) {
                require(study_h[j] > 0.0 && (j == 0 || study_h[j] < study_h[j - 1]),
                        "step sizes must be positive and strictly decreasing");
                const Grid study_grid = grid_for(study_h[j]);
                if (cfg.x0 && rule != "scale" && rule != "modified-chain") {
                    require(study_grid.index_of(*cfg.x0) >= 0,
                            "x0 is not a grid point for h = " + format_real(study_h[j]));
                }
            }
        }
    }
};

nlohmann::json config_echo(const ExperimentConfig& cfg) {
    nlohmann::json j = to_json(cfg);
    j.erase("outputs");
    return j;
}

Outcome run_rule(const Plan& plan, const std::string& rule, bool convergence_primary) {
    const ConvergenceReport conv = convergence_study(plan.rule_experiment(rule), plan.study_h);
    const RuleReport& finest = *conv.finest;

    Outcome o;
    if (convergence_primary) {
        o.content = to_json(conv);
        o.csv = to_csv(conv);
        o.svg = to_svg(chart_for(conv));
    } else {
        o.content = to_json(finest);
        o.content["verdict"] = std::string(to_string(conv.verdict));
        o.content["observed_order"] =
            std::isfinite(conv.observed_order) ? nlohmann::json(conv.observed_order) : nullptr;
        o.content["exact"] = conv.exact;
        o.content["convergence"] = to_json(conv);
        o.content["x_end"] = finest.residual.grid.back();
        o.content["residual_at_end"] = finest.residual.values.back();
        o.csv = to_csv(finest);
        o.svg = to_svg(chart_for(finest));
    }
    return o;
}

Outcome run_plan(const Plan& plan) {
    const ExperimentConfig& cfg = plan.cfg;
    const std::string& ex = plan.experiment;

    if (ex == "converge") return run_rule(plan, *cfg.rule, true);
    if (ex.starts_with("verify-")) return run_rule(plan, ex.substr(7), false);

    Outcome o;
    const Grid& grid = *plan.grid;
    if (ex == "derive" && plan.kind == OperatorKind::LocalQuotient) {
        std::vector<double> hs = cfg.h_values;
        if (hs.empty()) hs = {grid.h(), grid.h() / 2, grid.h() / 4, grid.h() / 8};
        const auto res = local_frac_derivative(plan.f->value, *cfg.x0, *plan.order, hs);
        o.content = {{"operator", "local"},
                     {"alpha", cfg.alpha},
                     {"x0", *cfg.x0},
                     {"estimate", res.estimate},
                     {"h_values", res.h_values},
                     {"quotients", res.quotients}};
        o.csv = csv_table({"h", "quotient"}, {res.h_values, res.quotients});
        o.svg = to_svg({"local quotient", "h", "quotient", res.h_values, res.quotients, true, false});
    } else if (ex == "derive") {
        const SampledFunction fs = sample(plan.f->value, grid, plan.f->spec);
        const SampledFunction d = frac_derivative(fs, plan.spec_for(grid));
        o.content = {{"operator", std::string(to_string(plan.kind))},
                     {"alpha", cfg.alpha},
                     {"base", grid.a()},
                     {"f", plan.f->spec},
                     {"grid", {{"a", grid.a()}, {"h", grid.h()}, {"n", grid.size()}}},
                     {"values", d.values}};
        o.csv = csv_table({"x", "value"}, {points_of(grid), d.values});
        o.svg = to_svg({"D^" + format_real(cfg.alpha) + " " + plan.f->spec, "x", "value",
                        points_of(grid), d.values, false, false});
    } else if (ex == "weierstrass") {
        const SampledFunction ws = sample(plan.f->value, grid, plan.f->spec);
        o.content = {{"f", plan.f->spec},
                     {"grid", {{"a", grid.a()}, {"h", grid.h()}, {"n", grid.size()}}},
                     {"values", ws.values}};
        o.csv = csv_table({"x", "value"}, {points_of(grid), ws.values});
        o.svg = to_svg({plan.f->spec, "x", "W(x)", points_of(grid), ws.values, false, false});
    } else if (ex == "holder") {
        const SampledFunction fs = sample(plan.f->value, grid, plan.f->spec);
        const std::size_t scales = cfg.num_scales.value_or(max_scales_for(grid.size()));
        const HolderEstimate est = holder_estimate(fs, scales);
        o.content = to_json(est);
        o.content["f"] = plan.f->spec;
        if (cfg.check_alpha) {
            const HolderCheck chk = holder_condition_check(fs, *cfg.check_alpha, *cfg.check_coeff);
            o.content["condition"] = {{"alpha", *cfg.check_alpha},
                                      {"A", *cfg.check_coeff},
                                      {"holds", chk.holds},
                                      {"worst_ratio", chk.worst_ratio},
                                      {"worst_pair", {chk.worst_i, chk.worst_k}},
                                      {"stride", chk.stride}};
        }
        o.csv = to_csv(est);
        o.svg = to_svg(chart_for(est));
    } else if (ex == "hadamard") {
        const auto dec = hadamard_decompose(plan.f->value, plan.f->first_derivative(),
                                            plan.f->second_derivative(), *cfg.x0, grid,
                                            cfg.quad_points);
        o.content = {{"f", plan.f->spec},
                     {"t0", dec.t0},
                     {"f_t0", dec.f_t0},
                     {"fprime_t0", dec.fprime_t0},
                     {"g2", dec.g2_values.values},
                     {"grid", {{"a", grid.a()}, {"h", grid.h()}, {"n", grid.size()}}},
                     {"reconstruction_residual", dec.reconstruction_residual}};
        o.csv = csv_table({"t", "g2"}, {points_of(grid), dec.g2_values.values});
        o.svg = to_svg({"Hadamard g2", "t", "g2", points_of(grid), dec.g2_values.values, false,
                        false});
    }
    return o;
}

}  // namespace

Outcome execute(const ExperimentConfig& cfg) {
    const Plan plan(cfg);
    Outcome o = run_plan(plan);
    o.content["experiment"] = cfg.experiment;
    o.content["config"] = config_echo(cfg);
    return o;
}

int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    Outcome o;
    try {
        o = execute(cfg);
    } catch (const validation_error& e) {
        err << "fracrule: invalid configuration: " << e.what() << '\n';
        return exit_validation_error;
    } catch (const std::exception& e) {
        err << "fracrule: " << e.what() << '\n';
        return exit_runtime_error;
    }

    const nlohmann::json sealed = seal(o.content);
    const std::string digest = sealed.at("content_digest").get<std::string>();
    try {
        if (cfg.outputs.empty()) {
            out << sealed.dump(2) << '\n';
            return exit_ok;
        }
        for (const auto& spec : cfg.outputs) {
            if (spec.format == "json") write_atomic(spec.path, sealed.dump(2) + "\n");
            else if (spec.format == "csv") write_atomic(spec.path, o.csv);
            else write_atomic(spec.path, o.svg);
        }
    } catch (const std::exception& e) {
        err << "fracrule: " << e.what() << '\n';
        return exit_runtime_error;
    }
    out << "content_digest: " << digest << '\n';
    return exit_ok;
}

}  // namespace fracrule::cli
