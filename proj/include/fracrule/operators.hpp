#pragma once

/**
 * @file operators.hpp
 * @brief Discretized fractional derivatives of order 0 < alpha <= 1.
 *
 * Riemann-Liouville is realized in Grunwald-Letnikov form,
 *
 *     D^a f(x_i) ~ h^(-a) * sum_{k=0..i} w_k f(x_i - k h),
 *     w_0 = 1,  w_k = w_{k-1} (k - 1 - a) / k,
 *
 * with the lower terminal at the grid origin. The Jumarie variant applies the
 * same convolution to f(x) - f(a); for continuously differentiable f it agrees
 * with the Caputo derivative, and it maps constants to exactly zero.
 *
 * The local quotient estimator works on a callable rather than samples and
 * extrapolates Gamma(1+a) (f(x0+h) - f(x0)) / h^a to h -> 0.
 */

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fracrule/core.hpp"

namespace fracrule {

enum class OperatorKind { RiemannLiouvilleGL, JumarieShiftedGL, LocalQuotient };

inline std::string_view to_string(OperatorKind k) noexcept {
    switch (k) {
        case OperatorKind::RiemannLiouvilleGL: return "rl";
        case OperatorKind::JumarieShiftedGL: return "jumarie";
        case OperatorKind::LocalQuotient: return "local";
    }
    return "?";
}

inline OperatorKind operator_kind_from_string(std::string_view s) {
    if (s == "rl" || s == "riemann-liouville") return OperatorKind::RiemannLiouvilleGL;
    if (s == "jumarie" || s == "caputo") return OperatorKind::JumarieShiftedGL;
    if (s == "local") return OperatorKind::LocalQuotient;
    throw std::invalid_argument("unknown operator kind '" + std::string(s) + "'");
}

struct OperatorSpec {
    OperatorKind kind;
    FractionalOrder order;
    double base;  ///< lower terminal; must equal the grid origin of the operand

    [[nodiscard]] double alpha() const noexcept { return order.value(); }

    friend bool operator==(const OperatorSpec&, const OperatorSpec&) = default;
};

/// First n Grunwald-Letnikov weights (-1)^k binom(alpha, k).
inline std::vector<double> gl_weights(FractionalOrder order, std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("gl_weights: need at least one weight");
    }
    const double a = order.value();
    std::vector<double> w(n);
    w[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double kd = static_cast<double>(k);
        w[k] = w[k - 1] * (kd - 1.0 - a) / kd;
    }
    return w;
}

/// Applies spec to f on f's own grid. Output index 0 carries the single k = 0
/// term of the convolution.
inline SampledFunction frac_derivative(const SampledFunction& f, const OperatorSpec& spec) {
    if (spec.kind == OperatorKind::LocalQuotient) {
        throw std::invalid_argument(
            "frac_derivative: the local quotient operator works on callables, use "
            "local_frac_derivative");
    }
    if (spec.base != f.grid.a()) {
        throw std::invalid_argument("frac_derivative: operator base " + std::to_string(spec.base) +
                                    " differs from grid origin " + std::to_string(f.grid.a()));
    }
    const std::size_t n = f.size();
    const double alpha = spec.alpha();

    std::vector<double> u = f.values;
    if (spec.kind == OperatorKind::JumarieShiftedGL) {
        const double f0 = f.values.front();
        for (double& v : u) v -= f0;
    }

    const std::vector<double> w = gl_weights(spec.order, n);
    const double scale = std::pow(f.grid.h(), -alpha);

    std::vector<double> out(n);
    parallel_for(n, [&](std::size_t i) {
        CompensatedSum acc;
        for (std::size_t k = 0; k <= i; ++k) acc.add(w[k] * u[i - k]);
        out[i] = scale * acc.value();
    }, 64);

    return SampledFunction(f.grid, std::move(out),
                           "D^" + std::to_string(alpha) + "[" + f.label + "]");
}

struct LocalDerivativeResult {
    double estimate;
    std::vector<double> h_values;
    std::vector<double> quotients;  ///< raw Gamma(1+a) (f(x0+h) - f(x0)) / h^a per h
};

/**
 * One-sided local fractional derivative at x0.
 *
 * The raw quotients are extrapolated by eliminating the error terms
 * h^(k - alpha) one at a time (k = 1, 2, ... for alpha < 1; k = 2, 3, ... for
 * alpha = 1), which is the expansion a smooth f produces. Functions whose
 * increment at x0 is exactly c (x - x0)^alpha give constant quotients and are
 * unaffected by the extrapolation. At most `levels` terms are eliminated.
 */
template <RealFunction F>
LocalDerivativeResult local_frac_derivative(F&& fn, double x0, FractionalOrder order,
                                            const std::vector<double>& h_sequence,
                                            std::size_t levels = 2) {
    if (h_sequence.empty()) {
        throw std::invalid_argument("local_frac_derivative: empty step sequence");
    }
    for (std::size_t j = 0; j < h_sequence.size(); ++j) {
        if (!(h_sequence[j] > 0.0) || (j > 0 && !(h_sequence[j] < h_sequence[j - 1]))) {
            throw std::invalid_argument(
                "local_frac_derivative: steps must be positive and strictly decreasing");
        }
    }
    const double alpha = order.value();
    const double g = gamma(1.0 + alpha);
    const double f0 = static_cast<double>(fn(x0));
    if (!std::isfinite(f0)) throw non_finite_error("local_frac_derivative: f(x0) not finite", 0);

    LocalDerivativeResult res{0.0, h_sequence, {}};
    res.quotients.reserve(h_sequence.size());
    for (std::size_t j = 0; j < h_sequence.size(); ++j) {
        const double h = h_sequence[j];
        const double fh = static_cast<double>(fn(x0 + h));
        if (!std::isfinite(fh)) {
            throw non_finite_error("local_frac_derivative: f(x0 + h) not finite", j);
        }
        res.quotients.push_back(g * (fh - f0) / std::pow(h, alpha));
    }

    std::vector<double> col = res.quotients;
    const double first_k = order.is_integer() ? 2.0 : 1.0;
    const std::size_t depth = std::min(levels, col.size() - 1);
    for (std::size_t lvl = 0; lvl < depth; ++lvl) {
        const double e = first_k + static_cast<double>(lvl) - alpha;
        std::vector<double> next(col.size() - 1);
        for (std::size_t j = 0; j + 1 < col.size(); ++j) {
            const double ha = std::pow(h_sequence[j], e);
            const double hb = std::pow(h_sequence[j + lvl + 1], e);
            // removes c h^e from col[j] (coarse) and col[j+1] (fine)
            next[j] = col[j + 1] == col[j] ? col[j] : (ha * col[j + 1] - hb * col[j]) / (ha - hb);
        }
        col = std::move(next);
    }
    res.estimate = col.back();
    return res;
}

}  // namespace fracrule
