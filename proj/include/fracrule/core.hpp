#pragma once

/**
 * @file core.hpp
 * @brief Shared domain types for the fractional-calculus toolkit.
 *
 * Everything downstream operates on a SampledFunction: real values tabulated
 * on a uniform Grid whose left endpoint doubles as the lower terminal of the
 * fractional operators. This header also carries the gamma function used by
 * the closed-form power-rule oracles, compensated summation, and a small
 * deterministic parallel_for.
 */

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdlib>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace fracrule {

// =============================================================================
// Errors
// =============================================================================

/// A sampled or evaluated value was NaN or infinite.
class non_finite_error : public std::runtime_error {
public:
    non_finite_error(const std::string& what, std::size_t index)
        : std::runtime_error(what + " (index " + std::to_string(index) + ")"), index_(index) {}

    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Two functions that must share a grid do not.
class grid_mismatch_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// =============================================================================
// Concepts
// =============================================================================

template <typename F>
concept RealFunction = requires(F f, double x) {
    { f(x) } -> std::convertible_to<double>;
};

// =============================================================================
// FractionalOrder
// =============================================================================

/// Order alpha of a fractional derivative, restricted to (0, 1].
class FractionalOrder {
public:
    explicit FractionalOrder(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0 && alpha <= 1.0)) {
            throw std::invalid_argument("fractional order must lie in (0, 1], got " +
                                        std::to_string(alpha));
        }
    }

    [[nodiscard]] double value() const noexcept { return alpha_; }
    [[nodiscard]] bool is_integer() const noexcept { return alpha_ == 1.0; }

    friend bool operator==(const FractionalOrder&, const FractionalOrder&) = default;

private:
    double alpha_;
};

// =============================================================================
// Grid
// =============================================================================

/// Uniform grid a, a + h, ..., a + (n-1) h.
class Grid {
public:
    Grid(double a, double h, std::size_t n) : a_(a), h_(h), n_(n) {
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw std::invalid_argument("grid step must be positive and finite");
        }
        if (n < 2) {
            throw std::invalid_argument("grid needs at least two points");
        }
        if (!std::isfinite(a)) {
            throw std::invalid_argument("grid origin must be finite");
        }
    }

    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double point(std::size_t i) const noexcept {
        return a_ + static_cast<double>(i) * h_;
    }
    [[nodiscard]] double back() const noexcept { return point(n_ - 1); }

    /// Index of the grid point equal to x within a small fraction of h, if any.
    [[nodiscard]] std::ptrdiff_t index_of(double x, double rel_tol = 1e-9) const noexcept {
        const double r = (x - a_) / h_;
        const double k = std::round(r);
        if (k < 0.0 || k > static_cast<double>(n_ - 1)) return -1;
        if (std::abs(r - k) > rel_tol) return -1;
        return static_cast<std::ptrdiff_t>(k);
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    double a_;
    double h_;
    std::size_t n_;
};

inline Grid make_grid(double a, double h, std::size_t n) { return Grid(a, h, n); }

/// Grid of step h covering [a, b]; b - a must be an integer multiple of h up to rounding.
inline Grid grid_over(double a, double b, double h) {
    const double steps = (b - a) / h;
    const double k = std::round(steps);
    if (k < 1.0 || std::abs(steps - k) > 1e-6) {
        throw std::invalid_argument("interval length is not a multiple of the step");
    }
    return Grid(a, h, static_cast<std::size_t>(k) + 1);
}

// =============================================================================
// SampledFunction
// =============================================================================

struct SampledFunction {
    Grid grid;
    std::vector<double> values;
    std::string label;

    SampledFunction(Grid g, std::vector<double> v, std::string lbl = {})
        : grid(g), values(std::move(v)), label(std::move(lbl)) {
        if (values.size() != grid.size()) {
            throw std::invalid_argument("sample count does not match grid size");
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!std::isfinite(values[i])) {
                throw non_finite_error("non-finite sample in '" + label + "'", i);
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] double x(std::size_t i) const noexcept { return grid.point(i); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values[i]; }
};

template <RealFunction F>
SampledFunction sample(F&& fn, const Grid& grid, std::string label = {}) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = static_cast<double>(fn(grid.point(i)));
        if (!std::isfinite(v[i])) {
            throw non_finite_error("function '" + label + "' is not finite on the grid", i);
        }
    }
    return SampledFunction(grid, std::move(v), std::move(label));
}

inline void require_same_grid(const SampledFunction& f, const SampledFunction& g) {
    if (!(f.grid == g.grid)) {
        throw grid_mismatch_error("functions '" + f.label + "' and '" + g.label +
                                  "' live on different grids");
    }
}

// =============================================================================
// WeierstrassParams
// =============================================================================

/// Parameters of the truncated Weierstrass series sum_n b^(-n alpha) cos(b^n x).
class WeierstrassParams {
public:
    /// Geometric bound on the discarded tail after n_terms terms.
    static double tail_bound(double alpha, double b, std::size_t n_terms) {
        const double r = std::pow(b, -alpha);
        return std::pow(r, static_cast<double>(n_terms)) / (1.0 - r);
    }

    /// Smallest term count whose tail bound is below tol.
    static std::size_t terms_for_tolerance(double alpha, double b, double tol = 1e-14) {
        std::size_t n = 1;
        while (tail_bound(alpha, b, n) >= tol) ++n;
        return n;
    }

    WeierstrassParams(double alpha, double b, std::size_t n_terms,
                      double tail_tolerance = default_tail_tolerance)
        : alpha_(alpha), b_(b), n_terms_(n_terms) {
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw std::invalid_argument("weierstrass: alpha must lie in (0, 1)");
        }
        if (!(b > 1.0) || !std::isfinite(b)) {
            throw std::invalid_argument("weierstrass: b must exceed 1");
        }
        if (n_terms == 0) {
            throw std::invalid_argument("weierstrass: need at least one term");
        }
        if (tail_tolerance > 0.0 && !(tail_bound(alpha, b, n_terms) < tail_tolerance)) {
            throw std::invalid_argument("weierstrass: truncation tail exceeds tolerance");
        }
    }

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] std::size_t n_terms() const noexcept { return n_terms_; }
    [[nodiscard]] double tail_bound() const { return tail_bound(alpha_, b_, n_terms_); }

    friend bool operator==(const WeierstrassParams&, const WeierstrassParams&) = default;

    // 40 terms at (alpha, b) = (0.5, 2) leave a tail of ~3.3e-6
    static constexpr double default_tail_tolerance = 1e-5;

private:
    double alpha_;
    double b_;
    std::size_t n_terms_;
};

// =============================================================================
// Compensated summation
// =============================================================================

/// Neumaier (Kahan-Babuska) accumulator. The result depends only on the
/// order in which terms are added.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double deterministic_sum(std::span<const double> terms) noexcept {
    CompensatedSum acc;
    for (double t : terms) acc.add(t);
    return acc.value();
}

// =============================================================================
// Gamma function
// =============================================================================

namespace detail {
inline constexpr double lanczos_g = 7.0;
inline constexpr double lanczos_coeffs[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
}  // namespace detail

/// Gamma(x) for x > 0 via the Lanczos approximation (g = 7, 9 terms),
/// with reflection below 1/2.
inline double gamma(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("gamma: argument must be positive");
    }
    if (x < 0.5) {
        // Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma(1.0 - x));
    }
    const double z = x - 1.0;
    double series = detail::lanczos_coeffs[0];
    for (int k = 1; k < 9; ++k) {
        series += detail::lanczos_coeffs[k] / (z + static_cast<double>(k));
    }
    const double t = z + detail::lanczos_g + 0.5;
    // split the power so t^(z+1/2) cannot overflow before exp(-t) is applied
    const double half_pow = std::pow(t, 0.5 * (z + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * half_pow * (half_pow * std::exp(-t)) * series;
}

// =============================================================================
// Threads
// =============================================================================

/// Worker count for library parallelism: FRACRULE_THREADS when set to a
/// positive integer, otherwise the hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("FRACRULE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/// Calls body(i) for i in [0, count) over contiguous blocks. Each index is
/// handled by exactly one call, so per-index results do not depend on the
/// number of threads.
template <typename Body>
void parallel_for(std::size_t count, Body&& body, std::size_t min_block = 256) {
    const std::size_t workers =
        std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, count / min_block));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t block = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(count, lo + block);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
}

}  // namespace fracrule
