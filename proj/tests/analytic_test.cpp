#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "powerprov/engine.hpp"

using namespace powerprov;

namespace {

constexpr double e = std::numbers::e;
const CostModel unit{1.0, 3.0, 3.0};

} // namespace

TEST(AnalyticRatio, A2Examples)
{
    const double delta = unit.delta();
    for (double alpha : {0.0, 0.3, 0.5, 0.9}) {
        EXPECT_NEAR(analytic_expected_ratio(PolicyKind::a2, delta, 0.0, alpha, unit), (e - alpha) / (e - 1), 1e-12);
        if (alpha > 0) {
            EXPECT_DOUBLE_EQ(analytic_expected_ratio(PolicyKind::a2, 0.9 * alpha * delta, 0.0, alpha, unit), 1.0);
        }
        const double te = 0.5 * (alpha * delta + delta);
        EXPECT_NEAR(analytic_expected_ratio(PolicyKind::a2, te, 0.0, alpha, unit),
                    e / (e - 1) - alpha / (e - 1) * delta / te, 1e-12);
    }
    EXPECT_NEAR(analytic_expected_ratio(PolicyKind::a2, 50.0, 0.0, 0.0, unit), e / (e - 1), 1e-12);
    EXPECT_NEAR(e / (e - 1), 1.5820, 1e-4);
}

TEST(AnalyticRatio, A1PeaksJustPastDelta)
{
    for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        EXPECT_NEAR(analytic_expected_ratio(PolicyKind::a1, 6.0 + 1e-9, 0.0, alpha, unit), 2.0 - alpha, 1e-6);
        for (double te = 0.0; te < 30.0; te += 0.37)
            for (double tb : {0.0, 1.0, 5.0})
                EXPECT_LE(analytic_expected_ratio(PolicyKind::a1, te, tb, alpha, unit), 2.0 - alpha + 1e-12);
    }
}

TEST(AnalyticRatio, A3WorstCaseIsLimitRatio)
{
    for (double alpha : {0.0, 0.25, 0.5, 1.0}) {
        double worst = 0.0;
        for (double te = 0.0; te < 30.0; te += 0.01)
            worst = std::max(worst, analytic_expected_ratio(PolicyKind::a3, te, 0.0, alpha, unit));
        EXPECT_NEAR(worst, e / (e - 1 + alpha), 1e-9);
    }
}

TEST(AnalyticRatio, RejectsOtherPolicies)
{
    EXPECT_THROW(analytic_expected_ratio(PolicyKind::delayed_off, 1.0, 0.0, 0.0, unit), ConfigError);
}

TEST(MonteCarlo, A1IsDeterministic)
{
    for (double te : {1.0, 6.0, 9.0}) {
        const auto mc = monte_carlo_ratio(PolicyKind::a1, te, 0.5, 0.5, unit, 1000, 3);
        EXPECT_DOUBLE_EQ(mc.std_error, 0.0);
        EXPECT_NEAR(mc.mean, analytic_expected_ratio(PolicyKind::a1, te, 0.5, 0.5, unit), 1e-12);
    }
}

TEST(MonteCarlo, A2AtDeltaMatchesClassicRatio)
{
    const auto mc = monte_carlo_ratio(PolicyKind::a2, unit.delta(), 0.0, 0.0, unit, 100000, 11);
    EXPECT_LE(std::fabs(mc.mean - e / (e - 1)), 3 * mc.std_error);
}

TEST(MonteCarlo, A3JustPastDelta)
{
    const auto mc = monte_carlo_ratio(PolicyKind::a3, unit.delta() + 1e-6, 0.0, 0.5, unit, 100000, 12);
    EXPECT_LE(std::fabs(mc.mean - e / (e - 0.5)), 3 * mc.std_error);
    EXPECT_NEAR(e / (e - 0.5), 1.2254, 1e-4);
}

TEST(Sampler, A3MassesSumToOne)
{
    for (double alpha : {0.0, 0.1, 0.5, 0.9, 1.0}) {
        const double atom = a3_atom(alpha);
        const double density = (e - 1) / (e - 1 + alpha);
        EXPECT_NEAR(atom + density, 1.0, 1e-12);
    }
}

TEST(Sampler, A3AtZeroMatchesClassicDensityKs)
{
    // CDF of the density e^{z/L} / ((e - 1) L) on [0, L].
    const double span = 6.0;
    Rng rng(2024);
    std::vector<double> z(100000);
    for (auto& v : z)
        v = sample_wait(PolicyKind::a3, 0.0, span, rng);
    std::sort(z.begin(), z.end());
    double ks = 0.0;
    const double n = static_cast<double>(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double cdf = (std::exp(z[i] / span) - 1.0) / (e - 1.0);
        ks = std::max({ks, std::fabs(cdf - static_cast<double>(i) / n), std::fabs(cdf - static_cast<double>(i + 1) / n)});
    }
    EXPECT_LT(ks, 0.01);
}
