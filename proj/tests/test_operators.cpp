#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <vector>

#include "fracrule/operators.hpp"

using namespace fracrule;

namespace {

OperatorSpec rl(double alpha, double base = 0.0) {
    return {OperatorKind::RiemannLiouvilleGL, FractionalOrder(alpha), base};
}
OperatorSpec jumarie(double alpha, double base = 0.0) {
    return {OperatorKind::JumarieShiftedGL, FractionalOrder(alpha), base};
}

double power_rule(double p, double alpha, double x) {
    return std::tgamma(p + 1.0) / std::tgamma(p + 1.0 - alpha) * std::pow(x, p - alpha);
}

/// Caputo derivative by quadrature: (1/Gamma(1-a)) int_0^x (x-t)^(-a) f'(t) dt with
/// u = (x-t)^(1-a) removing the endpoint singularity; composite Simpson in u.
template <typename Fp>
double caputo_quadrature(Fp fprime, double alpha, double x) {
    const double U = std::pow(x, 1.0 - alpha);
    const double e = 1.0 / (1.0 - alpha);
    const int m = 4000;
    const double h = U / m;
    auto g = [&](double u) { return fprime(x - std::pow(u, e)); };
    double s = g(0.0) + g(U);
    for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * g(i * h);
    return s * h / 3.0 / (1.0 - alpha) / std::tgamma(1.0 - alpha);
}

}  // namespace

TEST(GlWeights, Examples) {
    EXPECT_EQ(gl_weights(FractionalOrder(1.0), 4), (std::vector<double>{1, -1, 0, 0}));
    const auto w = gl_weights(FractionalOrder(0.5), 4);
    EXPECT_EQ(w, (std::vector<double>{1, -0.5, -0.125, -0.0625}));
    EXPECT_THROW(gl_weights(FractionalOrder(0.5), 0), std::invalid_argument);
}

TEST(GlWeights, MatchBinomialCoefficients) {
    // (-1)^k binom(a, k) = Gamma(k - a) / (Gamma(-a) Gamma(k + 1))
    for (double a : {0.2, 0.5, 0.9}) {
        const auto w = gl_weights(FractionalOrder(a), 30);
        for (int k = 0; k < 30; ++k) {
            const double ref = std::tgamma(k - a) / (std::tgamma(-a) * std::tgamma(k + 1.0));
            EXPECT_NEAR(w[k], ref, 1e-13 * std::max(1.0, std::abs(ref))) << "a=" << a << " k=" << k;
        }
    }
}

TEST(GlWeights, PartialSumsDecreaseToZero) {
    for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const auto w = gl_weights(FractionalOrder(a), 1001);
        double s = 0.0, prev = std::numeric_limits<double>::infinity();
        for (double wk : w) {
            s += wk;
            EXPECT_GT(s, 0.0);
            EXPECT_LT(s, prev);
            prev = s;
        }
        // sum_{k<=m} w_k = binom(m - a, m) ~ m^(-a) / Gamma(1 - a)
        EXPECT_NEAR(s, std::pow(1000.0, -a) / std::tgamma(1.0 - a), 0.01 * s);
    }
}

TEST(FracDerivative, IdentityHalfOrder) {
    const Grid g = grid_over(0.0, 1.0, 1.0 / 4000);
    const auto d = frac_derivative(sample([](double x) { return x; }, g), rl(0.5));
    EXPECT_NEAR(d.values.back(), 1.1283792, 1e-3);
    EXPECT_NEAR(2.0 * std::sqrt(1.0 / std::numbers::pi), 1.1283792, 1e-7);
    EXPECT_EQ(d.grid, g);
}

TEST(FracDerivative, ConstantRiemannLiouvilleVersusJumarie) {
    const Grid g = grid_over(0.0, 1.0, 1.0 / 4000);
    const auto one = sample([](double) { return 1.0; }, g);
    const auto d = frac_derivative(one, rl(0.5));
    for (std::size_t i = 1000; i < g.size(); ++i) {
        const double ref = std::pow(g.point(i), -0.5) / std::tgamma(0.5);
        EXPECT_NEAR(d[i], ref, 0.02 * ref);
    }
    for (double a : {0.3, 0.5, 0.7, 1.0}) {
        const auto dj = frac_derivative(one, jumarie(a));
        for (double v : dj.values) EXPECT_EQ(std::bit_cast<std::uint64_t>(v), 0u);
    }
}

TEST(FracDerivative, JumarieAnnihilatesConstantsProperty) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uc(-1e3, 1e3), ua(1e-3, 1.0), ub(-5, 5);
    for (int t = 0; t < 50; ++t) {
        const double c = uc(rng);
        const Grid g(ub(rng), 0.01, 200);
        const auto d = frac_derivative(sample([c](double) { return c; }, g), jumarie(ua(rng), g.a()));
        for (double v : d.values) EXPECT_EQ(v, 0.0);
    }
}

TEST(FracDerivative, OrderOneIsBackwardDifference) {
    double prev_err = 0.0;
    for (double h : {0.01, 0.005, 0.0025}) {
        const Grid g = grid_over(0.0, 1.0, h);
        const auto d = frac_derivative(sample([](double x) { return std::sin(x); }, g), rl(1.0));
        double err = 0.0;
        for (std::size_t i = 1; i < g.size(); ++i) {
            err = std::max(err, std::abs(d[i] - std::cos(g.point(i))));
        }
        if (prev_err > 0.0) {
            EXPECT_NEAR(prev_err / err, 2.0, 0.05);
        }
        prev_err = err;
    }
}

TEST(FracDerivative, JumarieMatchesCaputoOnSmoothInput) {
    for (double a : {0.3, 0.5, 0.7}) {
        double prev = 0.0;
        for (double h : {2e-3, 1e-3}) {
            const Grid g = grid_over(0.0, 1.0, h);
            const auto d = frac_derivative(sample([](double x) { return std::exp(x); }, g), jumarie(a));
            double err = 0.0;
            for (double x : {0.25, 0.5, 1.0}) {
                const auto i = static_cast<std::size_t>(g.index_of(x));
                err = std::max(err, std::abs(d[i] - caputo_quadrature(
                                                        [](double t) { return std::exp(t); }, a, x)));
            }
            EXPECT_LT(err, 5e-3) << "a=" << a;
            if (prev > 0.0) {
                EXPECT_GT(prev / err, 1.8);
            }
            prev = err;
        }
    }
}

TEST(FracDerivative, LinearityProperty) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uc(-3, 3), ua(0.05, 1.0);
    const Grid g = grid_over(0.0, 1.0, 0.005);
    for (int t = 0; t < 30; ++t) {
        const double c1 = uc(rng), c2 = uc(rng), p = uc(rng), q = uc(rng);
        const auto spec = rl(ua(rng));
        const auto f = sample([&](double x) { return std::sin(p * x) + q; }, g);
        const auto h = sample([&](double x) { return std::exp(q * x) * p; }, g);
        std::vector<double> mix(g.size());
        for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = c1 * f[i] + c2 * h[i];
        const auto dm = frac_derivative(SampledFunction(g, mix), spec);
        const auto df = frac_derivative(f, spec);
        const auto dh = frac_derivative(h, spec);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double expect = c1 * df[i] + c2 * dh[i];
            EXPECT_NEAR(dm[i], expect, 1e-12 * std::max(1.0, std::abs(c1 * df[i]) + std::abs(c2 * dh[i])));
        }
    }
}

TEST(FracDerivative, PowerRuleFirstOrder) {
    for (double p : {1.0, 2.0, 0.5}) {
        for (double a : {0.3, 0.5, 0.7}) {
            double errs[2];
            int r = 0;
            for (double h : {2e-3, 1e-3}) {
                const Grid g = grid_over(0.0, 1.0, h);
                const auto d = frac_derivative(sample([p](double x) { return std::pow(x, p); }, g), rl(a));
                double e = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    if (g.point(i) >= 0.25) e = std::max(e, std::abs(d[i] - power_rule(p, a, g.point(i))));
                }
                errs[r++] = e;
            }
            EXPECT_GE(std::log2(errs[0] / errs[1]), 0.9) << "p=" << p << " a=" << a;
        }
    }
}

TEST(FracDerivative, ThreadCountDoesNotChangeBits) {
    const Grid g = grid_over(0.0, 1.0, 1.0 / 3000);
    const auto f = sample([](double x) { return std::cos(7 * x) + x * x; }, g);
    ::setenv("FRACRULE_THREADS", "1", 1);
    const auto d1 = frac_derivative(f, rl(0.37));
    ::setenv("FRACRULE_THREADS", "4", 1);
    const auto d4 = frac_derivative(f, rl(0.37));
    ::unsetenv("FRACRULE_THREADS");
    ASSERT_EQ(d1.size(), d4.size());
    for (std::size_t i = 0; i < d1.size(); ++i) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(d1[i]), std::bit_cast<std::uint64_t>(d4[i]));
    }
}

TEST(FracDerivative, Errors) {
    const Grid g = grid_over(0.0, 1.0, 0.1);
    const auto f = sample([](double x) { return x; }, g);
    EXPECT_THROW(frac_derivative(f, rl(0.5, 0.1)), std::invalid_argument);
    EXPECT_THROW(frac_derivative(f, {OperatorKind::LocalQuotient, FractionalOrder(0.5), 0.0}),
                 std::invalid_argument);
    EXPECT_THROW(rl(1.2), std::invalid_argument);
}

TEST(LocalDerivative, HolderPowerIsExact) {
    const double x0 = 0.3;
    for (double a : {0.25, 0.5, 0.75}) {
        const auto r = local_frac_derivative([&](double x) { return std::pow(x - x0, a); }, x0,
                                             FractionalOrder(a), {1e-1, 5e-2, 2.5e-2, 1.25e-2});
        for (double q : r.quotients) EXPECT_NEAR(q, std::tgamma(1.0 + a), 1e-14);
        EXPECT_NEAR(r.estimate, std::tgamma(1.0 + a), 1e-13);
    }
    const auto half = local_frac_derivative([&](double x) { return std::sqrt(x - x0); }, x0,
                                            FractionalOrder(0.5), {1e-2, 1e-3, 1e-4});
    EXPECT_NEAR(half.estimate, 0.8862269, 1e-7);
}

TEST(LocalDerivative, ConstantAndClassical) {
    const auto c = local_frac_derivative([](double) { return 4.0; }, 1.0, FractionalOrder(0.5),
                                         {0.1, 0.05, 0.025});
    EXPECT_EQ(c.estimate, 0.0);
    for (double q : c.quotients) EXPECT_EQ(q, 0.0);

    const auto lin = local_frac_derivative([](double x) { return x; }, 2.0, FractionalOrder(1.0),
                                           {0.1, 0.05, 0.025});
    EXPECT_NEAR(lin.estimate, 1.0, 1e-12);

    const auto s = local_frac_derivative([](double x) { return std::sin(x); }, 0.3,
                                         FractionalOrder(1.0), {1e-2, 5e-3, 2.5e-3, 1.25e-3});
    EXPECT_NEAR(s.estimate, std::cos(0.3), 1e-6);
}

TEST(LocalDerivative, SmoothFunctionHasZeroLocalFractionalDerivative) {
    const auto s = local_frac_derivative([](double x) { return std::sin(x); }, 0.3,
                                         FractionalOrder(0.5), {1e-2, 5e-3, 2.5e-3, 1.25e-3});
    EXPECT_LT(std::abs(s.estimate), 1e-3);
    EXPECT_LT(std::abs(s.estimate), std::abs(s.quotients.back()));
}

TEST(LocalDerivative, Errors) {
    auto f = [](double x) { return x; };
    EXPECT_THROW(local_frac_derivative(f, 0.0, FractionalOrder(0.5), {0.1, 0.2}), std::invalid_argument);
    EXPECT_THROW(local_frac_derivative(f, 0.0, FractionalOrder(0.5), {}), std::invalid_argument);
    EXPECT_THROW(local_frac_derivative(f, 0.0, FractionalOrder(0.5), {0.1, -0.1}), std::invalid_argument);
    EXPECT_THROW(local_frac_derivative([](double x) { return std::log(x); }, 0.0, FractionalOrder(0.5),
                                       {0.1, 0.05}),
                 non_finite_error);
}
