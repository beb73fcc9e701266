#pragma once

/**
 * @file rules.hpp
 * @brief Residual measurements for algebraic rules of fractional derivatives.
 *
 * Each check produces a RuleReport holding a pointwise residual on the grid
 * and its norms. Norms skip a burn-in of ceil(0.05 n) leading points, where
 * the Grunwald-Letnikov start-up error lives. A ConvergenceReport reruns one
 * check over a sequence of steps and classifies the residual as vanishing or
 * persisting under refinement.
 */

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracrule/analysis.hpp"
#include "fracrule/core.hpp"
#include "fracrule/operators.hpp"

namespace fracrule {

struct RuleOptions {
    double burn_in_fraction = 0.05;
    std::size_t quad_points = 32;
};

struct RuleReport {
    std::string rule_name;
    SampledFunction residual;
    double sup_norm;
    double l2_norm;
    std::size_t burn_in;
    double h;
    OperatorSpec op;
    /// sup |LHS| over the retained indices; the magnitude residuals are judged against
    double reference_scale;
    std::optional<double> x0;
    std::optional<double> value_at_x0;
    SampledFunction lhs;  ///< left-hand side of the identity; rhs = lhs - residual
};

inline std::size_t burn_in_for(std::size_t n, double fraction) {
    return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
}

namespace detail {

inline double sup_from(std::span<const double> v, std::size_t first) {
    double m = 0.0;
    for (std::size_t i = first; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

inline double l2_from(std::span<const double> v, std::size_t first, double h) {
    CompensatedSum acc;
    for (std::size_t i = first; i < v.size(); ++i) acc.add(v[i] * v[i]);
    return std::sqrt(h * acc.value());
}

inline RuleReport make_report(std::string name, const SampledFunction& lhs,
                              std::vector<double> residual, const OperatorSpec& spec,
                              const RuleOptions& opt) {
    const std::size_t n = residual.size();
    const std::size_t burn = std::min(burn_in_for(n, opt.burn_in_fraction), n - 1);
    const double sup = sup_from(residual, burn);
    const double l2 = l2_from(residual, burn, lhs.grid.h());
    const double ref = sup_from(lhs.values, burn);
    return RuleReport{std::move(name),
                      SampledFunction(lhs.grid, std::move(residual), "residual"),
                      sup,
                      l2,
                      burn,
                      lhs.grid.h(),
                      spec,
                      ref,
                      std::nullopt,
                      std::nullopt,
                      lhs};
}

inline std::size_t require_grid_index(const Grid& g, double x0) {
    const auto idx = g.index_of(x0);
    if (idx < 0) {
        throw std::invalid_argument("x0 = " + std::to_string(x0) + " is not a grid point");
    }
    return static_cast<std::size_t>(idx);
}

}  // namespace detail

/// D(fg) - (Df) g - f (Dg), pointwise.
inline RuleReport leibniz_defect(const SampledFunction& f, const SampledFunction& g,
                                 const OperatorSpec& spec, const RuleOptions& opt = {}) {
    require_same_grid(f, g);
    std::vector<double> prod(f.size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = f[i] * g[i];
    const SampledFunction fg(f.grid, std::move(prod), f.label + "*" + g.label);

    const SampledFunction d_fg = frac_derivative(fg, spec);
    const SampledFunction d_f = frac_derivative(f, spec);
    const SampledFunction d_g = frac_derivative(g, spec);

    std::vector<double> r(f.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = d_fg[i] - d_f[i] * g[i] - f[i] * d_g[i];
    }
    return detail::make_report("leibniz", d_fg, std::move(r), spec, opt);
}

/**
 * D(f o w) - f'(w) Dw, pointwise, with f evaluated directly on the samples of
 * w. When x0 is given the report also carries the residual at that grid point.
 */
template <RealFunction F, RealFunction Fp>
RuleReport theorem_chain_residual(F&& f, Fp&& fprime, const SampledFunction& w,
                                  const OperatorSpec& spec, std::optional<double> x0 = {},
                                  const RuleOptions& opt = {}) {
    std::optional<std::size_t> i0;
    if (x0) i0 = detail::require_grid_index(w.grid, *x0);

    std::vector<double> fw(w.size());
    for (std::size_t i = 0; i < fw.size(); ++i) fw[i] = f(w[i]);
    const SampledFunction composed(w.grid, std::move(fw), "f(" + w.label + ")");

    const SampledFunction lhs = frac_derivative(composed, spec);
    const SampledFunction dw = frac_derivative(w, spec);

    std::vector<double> r(w.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = lhs[i] - static_cast<double>(fprime(w[i])) * dw[i];
    }
    RuleReport rep = detail::make_report("chain", lhs, std::move(r), spec, opt);
    if (i0) {
        rep.x0 = x0;
        rep.value_at_x0 = rep.residual[*i0];
    }
    return rep;
}

/**
 * D applied to r(x) = g2(w(x)) (w(x) - w(x0))^2, read at x0, where g2 is the
 * Hadamard remainder of f about t0 = w(x0). The residual field holds D r on
 * the whole grid; the norms describe the single value at x0.
 */
template <RealFunction Fpp>
RuleReport remainder_vanishing_check(Fpp&& fpp, const SampledFunction& w,
                                     const OperatorSpec& spec, double x0,
                                     const RuleOptions& opt = {}) {
    const std::size_t i0 = detail::require_grid_index(w.grid, x0);
    const GaussLegendre rule(opt.quad_points);
    const double t0 = w[i0];

    std::vector<double> r(w.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double d = w[i] - t0;
        r[i] = hadamard_g2(fpp, t0, w[i], rule) * d * d;
    }
    const SampledFunction rem(w.grid, std::move(r), "remainder");
    const SampledFunction dr = frac_derivative(rem, spec);
    const double v = dr[i0];

    const std::size_t burn =
        std::min(burn_in_for(dr.size(), opt.burn_in_fraction), dr.size() - 1);
    RuleReport rep{"remainder", dr,           std::abs(v), std::abs(v),
                   0,           w.grid.h(),   spec,        detail::sup_from(dr.values, burn),
                   x0,          v,            dr};
    return rep;
}

namespace detail {

/// LHS = D[f(lambda x)] on `grid`; RHS = lambda_pow * (D f) on the grid of step
/// lambda h, read at the same index, so w = lambda x_i exactly corresponds.
template <RealFunction F>
RuleReport scaled_residual(std::string name, F&& f, double lambda, double lambda_pow,
                           const OperatorSpec& spec, const Grid& grid, const RuleOptions& opt) {
    if (spec.base != 0.0) {
        throw std::invalid_argument(name + ": the scale identity needs lower terminal 0");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument(name + ": lambda must be positive");
    }
    if (grid.a() != 0.0) {
        throw std::invalid_argument(name + ": grid must start at the lower terminal 0");
    }
    const Grid wgrid(0.0, lambda * grid.h(), grid.size());

    // f(lambda x_i) is evaluated at w_i of the scaled grid so that both sides
    // see bitwise identical arguments
    std::vector<double> composed(grid.size());
    for (std::size_t i = 0; i < composed.size(); ++i) {
        composed[i] = f(wgrid.point(i));
        if (!std::isfinite(composed[i])) throw non_finite_error(name + ": f not finite", i);
    }
    const SampledFunction lhs_in(grid, composed, "f(lx)");
    const SampledFunction rhs_in(wgrid, std::move(composed), "f(w)");
    const SampledFunction lhs = frac_derivative(lhs_in, spec);
    const SampledFunction dw = frac_derivative(rhs_in, spec);

    std::vector<double> r(grid.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = lhs[i] - lambda_pow * dw[i];
    return make_report(std::move(name), lhs, std::move(r), spec, opt);
}

}  // namespace detail

/// D_x f(lambda x) - lambda^alpha (D_w f)(lambda x), lower terminal 0.
template <RealFunction F>
RuleReport scale_property_residual(F&& f, double lambda, const OperatorSpec& spec,
                                   const Grid& grid, const RuleOptions& opt = {}) {
    return detail::scaled_residual("scale", std::forward<F>(f), lambda,
                                   std::pow(lambda, spec.alpha()), spec, grid, opt);
}

/// D_x (f o w) - [(D_w f) o w] (w')^alpha for w = lambda x, where w' = lambda is
/// the classical derivative of the linear inner map.
template <RealFunction F>
RuleReport modified_chain_residual(F&& f, double lambda, const OperatorSpec& spec,
                                   const Grid& grid, const RuleOptions& opt = {}) {
    const double wprime = lambda;
    return detail::scaled_residual("modified-chain", std::forward<F>(f), lambda,
                                   std::pow(wprime, spec.alpha()), spec, grid, opt);
}

// =============================================================================
// Convergence studies
// =============================================================================

enum class Verdict { vanishes, persists };

inline std::string_view to_string(Verdict v) noexcept {
    return v == Verdict::vanishes ? "vanishes" : "persists";
}

struct VerdictPolicy {
    double min_order = 0.5;
    /// vanishing requires the finest sup-norm below this fraction of the reference scale
    double relative_threshold = 0.05;
    /// norms at or below this fraction of the reference scale count as rounding noise
    double exact_floor = 1e-9;
};

struct ConvergenceReport {
    std::vector<double> h_values;
    std::vector<double> norms;
    double observed_order;  ///< +inf when every norm is at the rounding floor
    Verdict verdict;
    bool exact;
    double reference_scale;
    std::optional<RuleReport> finest;
};

/// Least-squares slope of log(norm) against log(h); norms are clamped below at floor.
inline double observed_order(std::span<const double> h, std::span<const double> norms,
                             double floor) {
    std::vector<double> lx(h.size()), ly(h.size());
    const double tiny = std::max(floor, std::numeric_limits<double>::min());
    for (std::size_t i = 0; i < h.size(); ++i) {
        lx[i] = std::log(h[i]);
        ly[i] = std::log(std::max(norms[i], tiny));
    }
    return detail::least_squares(lx, ly).slope;
}

/// Runs experiment(h) for each h (strictly decreasing, at least three) and
/// classifies the sup-norm sequence.
template <typename Experiment>
    requires std::invocable<Experiment&, double>
ConvergenceReport convergence_study(Experiment&& experiment, std::span<const double> h_values,
                                    const VerdictPolicy& policy = {}) {
    if (h_values.size() < 3) {
        throw std::invalid_argument("convergence_study: need at least three step sizes");
    }
    for (std::size_t j = 0; j < h_values.size(); ++j) {
        if (!(h_values[j] > 0.0) || (j > 0 && !(h_values[j] < h_values[j - 1]))) {
            throw std::invalid_argument(
                "convergence_study: steps must be positive and strictly decreasing");
        }
    }

    ConvergenceReport out{{h_values.begin(), h_values.end()}, {}, 0.0, Verdict::persists,
                          false, 0.0, std::nullopt};
    std::optional<RuleReport> last;
    double ref = 0.0;
    for (double h : h_values) {
        RuleReport rep = experiment(h);
        out.norms.push_back(rep.sup_norm);
        ref = std::max(ref, rep.reference_scale);
        last = std::move(rep);
    }
    out.reference_scale = ref;
    out.finest = std::move(last);

    const double floor = policy.exact_floor * ref;
    bool exact = true;
    for (double nrm : out.norms) exact = exact && nrm <= floor;
    out.exact = exact;

    if (exact) {
        out.observed_order = std::numeric_limits<double>::infinity();
        out.verdict = Verdict::vanishes;
        return out;
    }
    out.observed_order = observed_order(out.h_values, out.norms, floor);
    const double final_norm = out.norms.back();
    const double final_ref = out.finest->reference_scale;
    out.verdict = (out.observed_order >= policy.min_order &&
                   final_norm < policy.relative_threshold * final_ref)
                      ? Verdict::vanishes
                      : Verdict::persists;
    return out;
}

}  // namespace fracrule
