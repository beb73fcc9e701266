#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "fracrule/core.hpp"

using namespace fracrule;

TEST(Grid, PointsAreExact) {
    const Grid g = make_grid(0.0, 0.5, 3);
    EXPECT_EQ(g.point(0), 0.0);
    EXPECT_EQ(g.point(1), 0.5);
    EXPECT_EQ(g.point(2), 1.0);

    const Grid s = make_grid(-1.0, 0.25, 9);
    EXPECT_EQ(s.point(0), -1.0);
    EXPECT_EQ(s.point(4), 0.0);
    EXPECT_EQ(s.back(), 1.0);

    const Grid fine = make_grid(0.0, 1e-3, 1001);
    EXPECT_NEAR(fine.back(), 1.0, 1e-15);
}

TEST(Grid, RejectsBadArguments) {
    EXPECT_THROW(make_grid(0.0, 0.0, 10), std::invalid_argument);
    EXPECT_THROW(make_grid(0.0, -0.1, 10), std::invalid_argument);
    EXPECT_THROW(make_grid(0.0, 0.1, 1), std::invalid_argument);
    EXPECT_THROW(grid_over(0.0, 1.0, 0.3), std::invalid_argument);
}

TEST(Grid, IndexRoundTripProperty) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(-10.0, 10.0), uh(1e-4, 1.0);
    std::uniform_int_distribution<std::size_t> un(2, 5000);
    for (int trial = 0; trial < 200; ++trial) {
        const Grid g(ua(rng), uh(rng), un(rng));
        for (std::size_t i = 0; i < g.size(); i += 1 + g.size() / 50) {
            EXPECT_EQ(std::round((g.point(i) - g.a()) / g.h()), static_cast<double>(i));
            EXPECT_EQ(g.index_of(g.point(i)), static_cast<std::ptrdiff_t>(i));
        }
        EXPECT_EQ(g.index_of(g.point(0) + 0.5 * g.h()), -1);
    }
}

TEST(Sample, TabulatesOnGrid) {
    const Grid g = make_grid(0.0, 0.5, 3);
    EXPECT_EQ(sample([](double x) { return x; }, g).values, (std::vector<double>{0, 0.5, 1}));
    EXPECT_EQ(sample([](double) { return 1.0; }, g).values, (std::vector<double>{1, 1, 1}));
    EXPECT_EQ(sample([](double x) { return x * x; }, g).values,
              (std::vector<double>{0, 0.25, 1}));
}

TEST(Sample, NamesNonFiniteIndex) {
    const Grid g = make_grid(-1.0, 0.5, 5);
    try {
        sample([](double x) { return 1.0 / x; }, g, "inv");
        FAIL() << "expected non_finite_error";
    } catch (const non_finite_error& e) {
        EXPECT_EQ(e.index(), 2u);
    }
}

TEST(DeterministicSum, Examples) {
    const std::vector<double> a{1, 2, 3};
    EXPECT_EQ(deterministic_sum(a), 6.0);
    EXPECT_EQ(deterministic_sum(std::span<const double>{}), 0.0);
    const std::vector<double> c{1e16, 1.0, -1e16};
    EXPECT_EQ(deterministic_sum(c), 1.0);
    double naive = 0.0;
    for (double t : c) naive += t;
    EXPECT_EQ(naive, 0.0);
}

TEST(DeterministicSum, RunInvariant) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd(0.0, 1e6);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(10000);
        for (double& x : v) x = nd(rng);
        const double s1 = deterministic_sum(v);
        const double s2 = deterministic_sum(v);
        EXPECT_EQ(std::bit_cast<std::uint64_t>(s1), std::bit_cast<std::uint64_t>(s2));
    }
}

TEST(Gamma, KnownValues) {
    EXPECT_DOUBLE_EQ(fracrule::gamma(1.0), 1.0);
    EXPECT_NEAR(fracrule::gamma(0.5), 1.7724538509055160, 1e-14);
    EXPECT_NEAR(fracrule::gamma(1.5), 0.88622692545275801, 1e-14);
    EXPECT_NEAR(fracrule::gamma(5.0), 24.0, 24.0 * 1e-14);
    EXPECT_THROW(fracrule::gamma(0.0), std::domain_error);
    EXPECT_THROW(fracrule::gamma(-1.5), std::domain_error);
}

TEST(Gamma, HalfMatchesEulerIntegral) {
    // Gamma(1/2) = int_0^inf t^(-1/2) e^(-t) dt = 2 int_0^inf e^(-u^2) du, Simpson on [0, 12]
    const int m = 20000;
    const double L = 12.0;
    const double h = L / m;
    double s = 1.0 + std::exp(-L * L);
    for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * std::exp(-(i * h) * (i * h));
    const double euler = 2.0 * s * h / 3.0;
    EXPECT_NEAR(fracrule::gamma(0.5), euler, 1e-12);
}

TEST(Gamma, RelativeErrorAgainstLibm) {
    for (int i = 1; i <= 5000; ++i) {
        const double x = 50.0 * i / 5000.0;
        const double ref = std::tgamma(x);
        EXPECT_LE(std::abs(fracrule::gamma(x) - ref) / ref, 1e-12) << "x = " << x;
    }
}

TEST(Gamma, RecurrenceSweep) {
    for (int i = 1; i <= 1000; ++i) {
        const double x = 40.0 * i / 1000.0;
        const double gx1 = fracrule::gamma(x + 1.0);
        EXPECT_LE(std::abs(gx1 - x * fracrule::gamma(x)) / gx1, 1e-12) << "x = " << x;
    }
}

TEST(FractionalOrder, Range) {
    EXPECT_NO_THROW(FractionalOrder(1.0));
    EXPECT_NO_THROW(FractionalOrder(1e-6));
    EXPECT_THROW(FractionalOrder(0.0), std::invalid_argument);
    EXPECT_THROW(FractionalOrder(1.5), std::invalid_argument);
    EXPECT_THROW(FractionalOrder(std::nan("")), std::invalid_argument);
}

TEST(WeierstrassParams, TailTolerance) {
    EXPECT_NO_THROW(WeierstrassParams(0.5, 2.0, 40));
    EXPECT_THROW(WeierstrassParams(0.5, 2.0, 10), std::invalid_argument);
    EXPECT_THROW(WeierstrassParams(1.0, 2.0, 40), std::invalid_argument);
    EXPECT_THROW(WeierstrassParams(0.5, 1.0, 40), std::invalid_argument);
    const std::size_t n = WeierstrassParams::terms_for_tolerance(0.5, 2.0);
    EXPECT_LT(WeierstrassParams::tail_bound(0.5, 2.0, n), 1e-14);
    EXPECT_GE(WeierstrassParams::tail_bound(0.5, 2.0, n - 1), 1e-14);
}

TEST(ParallelFor, CoversEveryIndexOnce) {
    std::vector<int> hits(10007, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 16);
    for (int h : hits) EXPECT_EQ(h, 1);
}
