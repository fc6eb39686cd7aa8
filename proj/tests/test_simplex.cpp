#include "steerscan/simplex.hpp"

#include <gtest/gtest.h>

#include <cmath>

using steerscan::SimplexOptions;
using steerscan::simplex_maximize;

TEST(Simplex, FindsQuadraticPeak)
{
    auto f = [](const std::vector<double>& p) {
        return -(p[0] - 1.5) * (p[0] - 1.5) - 2.0 * (p[1] + 0.5) * (p[1] + 0.5);
    };
    const auto res = simplex_maximize(f, {0.0, 0.0});
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.point[0], 1.5, 1e-4);
    EXPECT_NEAR(res.point[1], -0.5, 1e-4);
    EXPECT_NEAR(res.value, 0.0, 1e-8);
}

TEST(Simplex, RespectsBox)
{
    SimplexOptions opts;
    opts.lower = {0.0};
    opts.upper = {1.0};
    const auto res = simplex_maximize([](const std::vector<double>& p) { return p[0]; }, {0.5}, opts);
    EXPECT_LE(res.point[0], 1.0);
    EXPECT_NEAR(res.point[0], 1.0, 1e-8);
}

TEST(Simplex, IterationBudget)
{
    SimplexOptions opts;
    opts.max_iterations = 3;
    const auto res = simplex_maximize(
        [](const std::vector<double>& p) { return -std::abs(p[0] - 100.0); }, {0.0}, opts);
    EXPECT_LE(res.iterations, 3);
    EXPECT_FALSE(res.converged);
}

TEST(Simplex, NeverWorseThanStart)
{
    auto rosen = [](const std::vector<double>& p) {
        const double a = 1.0 - p[0];
        const double b = p[1] - p[0] * p[0];
        return -(a * a + 100.0 * b * b);
    };
    const std::vector<double> start{-1.2, 1.0};
    const auto res = simplex_maximize(rosen, start);
    EXPECT_GE(res.value, rosen(start));
}

TEST(Simplex, Deterministic)
{
    auto f = [](const std::vector<double>& p) { return std::cos(p[0]) * std::sin(p[1]); };
    const auto a = simplex_maximize(f, {0.3, 0.2});
    const auto b = simplex_maximize(f, {0.3, 0.2});
    EXPECT_EQ(a.point, b.point);
    EXPECT_EQ(a.evaluations, b.evaluations);
}
