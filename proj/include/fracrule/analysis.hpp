#pragma once

/**
 * @file analysis.hpp
 * @brief Coarse-grained test functions, Holder regularity, and the Hadamard
 *        second-order decomposition.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracrule/core.hpp"

namespace fracrule {

// =============================================================================
// Weierstrass series
// =============================================================================

/// Truncated W(x) = sum_{n < n_terms} b^(-n alpha) cos(b^n x), summed from the
/// n = 0 term downward with compensation.
inline double weierstrass(const WeierstrassParams& p, double x) {
    CompensatedSum acc;
    const double decay = std::pow(p.b(), -p.alpha());
    double amp = 1.0;
    double freq = 1.0;
    for (std::size_t n = 0; n < p.n_terms(); ++n) {
        acc.add(amp * std::cos(freq * x));
        amp *= decay;
        freq *= p.b();
    }
    return acc.value();
}

// =============================================================================
// Holder exponent
// =============================================================================

class flat_function_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class insufficient_grid_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct HolderEstimate {
    double exponent_hat;
    double coefficient_hat;
    double r_squared;
    std::vector<double> scales_used;
    std::vector<double> oscillations;
};

namespace detail {

/// max over all windows of `span` index steps of (max - min).
inline double max_window_oscillation(const std::vector<double>& v, std::size_t span) {
    const std::size_t n = v.size();
    span = std::min(span, n - 1);
    std::deque<std::size_t> hi, lo;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        while (!hi.empty() && v[hi.back()] <= v[i]) hi.pop_back();
        while (!lo.empty() && v[lo.back()] >= v[i]) lo.pop_back();
        hi.push_back(i);
        lo.push_back(i);
        if (hi.front() + span < i) hi.pop_front();
        if (lo.front() + span < i) lo.pop_front();
        if (i >= span) best = std::max(best, v[hi.front()] - v[lo.front()]);
    }
    return best;
}

struct LineFit {
    double slope;
    double intercept;
    double r_squared;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double m = static_cast<double>(x.size());
    CompensatedSum sx, sy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / m;
    const double my = sy.value() / m;
    CompensatedSum sxx, sxy, syy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        syy.add(dy * dy);
    }
    const double slope = sxy.value() / sxx.value();
    const double intercept = my - slope * mx;
    const double r2 = syy.value() == 0.0
                          ? 1.0
                          : (sxy.value() * sxy.value()) / (sxx.value() * syy.value());
    return {slope, intercept, r2};
}

}  // namespace detail

/**
 * Fits |f(x) - f(y)| <= A |x - y|^alpha from oscillation scaling.
 *
 * For h_j = 2^j h (j = 1..num_scales) the oscillation M(h_j) is the largest
 * difference between any two samples at most h_j apart. The slope of
 * log M against log h is the exponent, exp(intercept) the coefficient. When
 * the fit has r^2 < 0.98 and at least six scales are available, the two
 * coarsest scales are dropped and the fit repeated.
 */
inline HolderEstimate holder_estimate(const SampledFunction& f, std::size_t num_scales) {
    if (num_scales < 4) {
        throw std::invalid_argument("holder_estimate: need at least 4 scales");
    }
    if (num_scales >= 63 || f.size() < (std::size_t{1} << num_scales)) {
        throw insufficient_grid_error("holder_estimate: grid of " + std::to_string(f.size()) +
                                      " points is too small for " + std::to_string(num_scales) +
                                      " dyadic scales");
    }

    std::vector<double> scales, osc;
    bool any_nonzero = false;
    for (std::size_t j = 1; j <= num_scales; ++j) {
        const std::size_t span = std::size_t{1} << j;
        const double m = detail::max_window_oscillation(f.values, span);
        if (m > 0.0) {
            any_nonzero = true;
            scales.push_back(static_cast<double>(span) * f.grid.h());
            osc.push_back(m);
        }
    }
    if (!any_nonzero) {
        throw flat_function_error("holder_estimate: all oscillations vanish, exponent undefined");
    }
    if (scales.size() < 4) {
        throw insufficient_grid_error("holder_estimate: fewer than 4 scales with nonzero oscillation");
    }

    auto fit = [](const std::vector<double>& s, const std::vector<double>& m) {
        std::vector<double> ls(s.size()), lm(m.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            ls[i] = std::log(s[i]);
            lm[i] = std::log(m[i]);
        }
        return detail::least_squares(ls, lm);
    };

    detail::LineFit lf = fit(scales, osc);
    if (lf.r_squared < 0.98 && scales.size() >= 6) {
        scales.resize(scales.size() - 2);
        osc.resize(osc.size() - 2);
        lf = fit(scales, osc);
    }
    return HolderEstimate{lf.slope, std::exp(lf.intercept), lf.r_squared, std::move(scales),
                          std::move(osc)};
}

struct HolderCheck {
    bool holds;
    double worst_ratio;  ///< max |f_i - f_k| / |x_i - x_k|^alpha over scanned pairs
    std::size_t worst_i;
    std::size_t worst_k;
    std::size_t stride;
};

/// Default pair-scan stride: exhaustive up to 4096 points, ceil(n / 4096) beyond.
inline std::size_t default_holder_stride(std::size_t n) noexcept {
    return n <= 4096 ? 1 : (n + 4095) / 4096;
}

/**
 * Checks |f(x1) - f(x2)| <= A |x1 - x2|^alpha over all pairs of grid points
 * whose indices are multiples of stride. Ratios are compared with a relative
 * slack of 1e-12 so that exact equality survives rounding. The worst pair is
 * the smallest (i, k) attaining the maximal ratio.
 */
inline HolderCheck holder_condition_check(const SampledFunction& f, double alpha, double A,
                                          std::size_t stride = 0) {
    if (!(A > 0.0)) throw std::invalid_argument("holder_condition_check: A must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("holder_condition_check: alpha must lie in (0, 1]");
    }
    if (stride == 0) stride = default_holder_stride(f.size());

    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < f.size(); i += stride) idx.push_back(i);
    const std::size_t m = idx.size();

    std::vector<double> best(m, -1.0);
    std::vector<std::size_t> best_k(m, 0);
    parallel_for(m, [&](std::size_t p) {
        const std::size_t i = idx[p];
        for (std::size_t q = p + 1; q < m; ++q) {
            const std::size_t k = idx[q];
            const double dx = std::abs(f.x(k) - f.x(i));
            const double r = std::abs(f[k] - f[i]) / std::pow(dx, alpha);
            if (r > best[p]) {
                best[p] = r;
                best_k[p] = k;
            }
        }
    }, 16);

    HolderCheck out{true, 0.0, 0, idx.size() > 1 ? idx[1] : 0, stride};
    for (std::size_t p = 0; p + 1 < m; ++p) {
        if (best[p] > out.worst_ratio) {
            out.worst_ratio = best[p];
            out.worst_i = idx[p];
            out.worst_k = best_k[p];
        }
    }
    out.holds = out.worst_ratio <= A * (1.0 + 1e-12);
    return out;
}

struct ProductHolderCheck {
    bool holds;
    HolderEstimate product;
    HolderCheck condition;  ///< product checked against its own fitted (alpha_hat, A_hat)
};

/// Largest usable dyadic scale count for a grid, capped at `cap`.
inline std::size_t max_scales_for(std::size_t n, std::size_t cap = 8) {
    std::size_t s = 0;
    while (s + 1 < 63 && (std::size_t{1} << (s + 1)) <= n) ++s;
    return std::min(s, cap);
}

/// Product f*g is judged alpha-Holder when its fitted exponent is at least alpha - 0.1.
inline ProductHolderCheck product_holder_check(const SampledFunction& f, const SampledFunction& g,
                                               double alpha, std::size_t num_scales = 0) {
    require_same_grid(f, g);
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[i] * g[i];
    const SampledFunction fg(f.grid, std::move(v), f.label + "*" + g.label);
    if (num_scales == 0) num_scales = max_scales_for(fg.size());

    HolderEstimate est = holder_estimate(fg, num_scales);
    const double a_hat = std::clamp(est.exponent_hat, 1e-6, 1.0);
    HolderCheck cond = holder_condition_check(fg, a_hat, est.coefficient_hat);
    const bool ok = est.exponent_hat >= alpha - 0.1;
    return {ok, std::move(est), cond};
}

// =============================================================================
// Gauss-Legendre quadrature
// =============================================================================

/// Nodes and weights on [0, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(std::size_t n) : nodes(n), weights(n) {
        if (n < 2) throw std::invalid_argument("gauss-legendre: need at least 2 nodes");
        const double nd = static_cast<double>(n);
        for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
            // Newton on P_n from the Chebyshev-like initial guess
            double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = z;
                for (std::size_t k = 2; k <= n; ++k) {
                    const double kd = static_cast<double>(k);
                    const double p2 = ((2.0 * kd - 1.0) * z * p1 - (kd - 1.0) * p0) / kd;
                    p0 = p1;
                    p1 = p2;
                }
                dp = nd * (z * p1 - p0) / (z * z - 1.0);
                const double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            // recompute derivative at converged node
            {
                double p0 = 1.0, p1 = z;
                for (std::size_t k = 2; k <= n; ++k) {
                    const double kd = static_cast<double>(k);
                    const double p2 = ((2.0 * kd - 1.0) * z * p1 - (kd - 1.0) * p0) / kd;
                    p0 = p1;
                    p1 = p2;
                }
                dp = nd * (z * p1 - p0) / (z * z - 1.0);
            }
            const double w = 2.0 / ((1.0 - z * z) * dp * dp);
            // map [-1, 1] -> [0, 1]
            nodes[i] = 0.5 * (1.0 - z);
            nodes[n - 1 - i] = 0.5 * (1.0 + z);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
    }

    template <RealFunction F>
    [[nodiscard]] double integrate01(F&& fn) const {
        CompensatedSum acc;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double v = weights[i] * static_cast<double>(fn(nodes[i]));
            if (!std::isfinite(v)) throw non_finite_error("quadrature: non-finite integrand", i);
            acc.add(v);
        }
        return acc.value();
    }
};

// =============================================================================
// Hadamard decomposition
// =============================================================================

/// g2(t) = int_0^1 (1 - s) f''(t0 + s (t - t0)) ds, with g2(t0) = f''(t0) / 2.
template <RealFunction Fpp>
double hadamard_g2(Fpp&& fpp, double t0, double t, const GaussLegendre& rule) {
    if (t == t0) {
        const double v = 0.5 * static_cast<double>(fpp(t0));
        if (!std::isfinite(v)) throw non_finite_error("hadamard_g2: f''(t0) not finite", 0);
        return v;
    }
    const double dt = t - t0;
    const double v = rule.integrate01([&](double s) { return (1.0 - s) * fpp(t0 + s * dt); });
    if (!std::isfinite(v)) throw non_finite_error("hadamard_g2: integral not finite", 0);
    return v;
}

template <RealFunction Fpp>
double hadamard_g2(Fpp&& fpp, double t0, double t, std::size_t quad_points = 32) {
    return hadamard_g2(std::forward<Fpp>(fpp), t0, t, GaussLegendre(quad_points));
}

struct HadamardDecomposition {
    double t0;
    double f_t0;
    double fprime_t0;
    SampledFunction g2_values;
    double reconstruction_residual;  ///< max |f(t) - [f(t0) + f'(t0)(t-t0) + g2(t)(t-t0)^2]|
};

/// f(t) = f(t0) + f'(t0)(t - t0) + g2(t)(t - t0)^2 tabulated on grid.
template <RealFunction F, RealFunction Fp, RealFunction Fpp>
HadamardDecomposition hadamard_decompose(F&& fn, Fp&& fprime, Fpp&& fpp, double t0,
                                         const Grid& grid, std::size_t quad_points = 32) {
    if (t0 < grid.a() || t0 > grid.back()) {
        throw std::invalid_argument("hadamard_decompose: t0 outside the grid range");
    }
    const GaussLegendre rule(quad_points);
    const double f0 = fn(t0);
    const double fp0 = fprime(t0);
    std::vector<double> g2(grid.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.point(i);
        g2[i] = hadamard_g2(fpp, t0, t, rule);
        const double d = t - t0;
        const double rebuilt = f0 + fp0 * d + g2[i] * d * d;
        worst = std::max(worst, std::abs(static_cast<double>(fn(t)) - rebuilt));
    }
    return {t0, f0, fp0, SampledFunction(grid, std::move(g2), "g2"), worst};
}

}  // namespace fracrule
