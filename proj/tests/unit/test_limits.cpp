#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hcdep/limits.hpp"

using namespace hcdep;

TEST(Limits, GumbelInversePair) {
    for (double kappa : {kHcGumbelKappa, trimmed_gumbel_kappa(0.5), 1.0})
        for (double u : {1e-6, 1e-3, 0.05, 0.5, 0.95, 0.999, 1 - 1e-6})
            EXPECT_NEAR(gumbel_cdf(kappa, gumbel_quantile(kappa, u)), u, 1e-12);
    EXPECT_THROW(gumbel_quantile(1.0, 0.0), DomainError);
    EXPECT_THROW(gumbel_quantile(1.0, 1.0), DomainError);
}

TEST(Limits, GumbelQuantileClosedForm) {
    const double x = -std::log(2 * std::sqrt(std::numbers::pi) * std::log(1 / 0.95));
    EXPECT_NEAR(gumbel_quantile(kHcGumbelKappa, 0.95), x, 1e-14);
    EXPECT_NEAR(gumbel_cdf(kHcGumbelKappa, x), 0.95, 1e-14);
    EXPECT_NEAR(gumbel_quantile(kHcGumbelKappa / 2, 0.9), gumbel_quantile(kHcGumbelKappa, 0.9) - std::log(2.0),
                1e-14);
    // d = 0.5: numeric root of the CDF as oracle.
    const double k = trimmed_gumbel_kappa(0.5);
    double lo = -20;
    double hi = 20;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::exp(-k * std::exp(-mid)) < 0.95 ? lo : hi) = mid;
    }
    EXPECT_NEAR(gumbel_quantile(k, 0.95), 0.5 * (lo + hi), 1e-12);
}

TEST(Limits, GumbelLimitSequences) {
    EXPECT_THROW(GumbelLimit(15.0, 1.0), DomainError);
    const GumbelLimit g(1e6, kHcGumbelKappa);
    const double ll = std::log(std::log(1e6));
    EXPECT_NEAR(g.a_p, std::sqrt(2 * ll), 1e-15);
    EXPECT_NEAR(g.b_p, (2 * ll + 0.5 * std::log(ll)) / std::sqrt(2 * ll), 1e-15);
    EXPECT_NEAR(g.normalize(g.denormalize(1.7)), 1.7, 1e-14);
}

TEST(Limits, HcCriticalValue) {
    const double p = 1e6;
    const GumbelLimit g(p, kHcGumbelKappa);
    const double xg = gumbel_quantile(kHcGumbelKappa, 0.95);
    const double ll = std::log(std::log(p));
    EXPECT_NEAR(hc_critical_value(p, 0.05), (2 * ll + 0.5 * std::log(ll) + xg) / std::sqrt(2 * ll), 1e-13);
    EXPECT_NEAR(hc_critical_value(p, 0.05), g.b_p + xg / g.a_p, 1e-13);
    EXPECT_GT(hc_critical_value(p, 0.01), hc_critical_value(p, 0.05));
    EXPECT_THROW(hc_critical_value(10.0, 0.05), DomainError);
}

TEST(Limits, LambdaExpansionGapShrinks) {
    double prev = INFINITY;
    for (double p : {1e4, 1e6, 1e8}) {
        const auto e = lambda_range_expansion(p, 1.0, 0.5, RangeVariant::hc_poly);
        const double gap = std::abs(e.lambda2_approx - e.lambda2_exact);
        EXPECT_LT(gap, prev);
        prev = gap;
        EXPECT_LT(e.lambda2_approx * e.lambda2_approx, 2 * std::log(p));
    }
}

TEST(Limits, LambdaExpansionLoglog) {
    // log log p = e  =>  lambda1^2 = 2e - 1 - log pi at d = 1.
    const double p = std::exp(std::exp(std::numbers::e));
    const auto e = lambda_range_expansion(p, 1.0, 1.0, RangeVariant::hc_loglog);
    EXPECT_NEAR(e.lambda1_approx * e.lambda1_approx, 2 * std::numbers::e - 1 - std::log(std::numbers::pi), 1e-12);
    EXPECT_NEAR(pi0(e.lambda1_exact), std::pow(std::log(p), -1.0), 1e-12);
}

TEST(Limits, LocalStationaryConstants) {
    EXPECT_THROW(LocalStationaryConstants(1.0, 0.5, 2.0, 100.0), DomainError);
    EXPECT_THROW(pickands_constant(1.5), DomainError);
    const LocalStationaryConstants k1(1.0, 0.5, 1000.0);
    EXPECT_NEAR(mt_gumbel_log_argument(k1), 1.0 / (2 * std::sqrt(std::numbers::pi)), 1e-15);
    const auto [a, b] = mt_gumbel_params(k1);
    const double lt = std::log(1000.0);
    EXPECT_NEAR(a, std::sqrt(2 * lt), 1e-14);
    EXPECT_NEAR(b, a + (0.5 * std::log(lt) + std::log(0.5 / std::sqrt(std::numbers::pi))) / a, 1e-14);
    // alpha = 2: the log log T coefficient vanishes.
    const LocalStationaryConstants k2(2.0, 1.0, 1000.0);
    const auto [a2, b2] = mt_gumbel_params(k2);
    EXPECT_NEAR(b2, a2 + std::log(1.0 / std::sqrt(std::numbers::pi) / std::sqrt(2 * std::numbers::pi)) / a2, 1e-14);
    EXPECT_THROW(mt_gumbel_params(LocalStationaryConstants(1.0, 0.5, 2.0)), DomainError);
}

TEST(Limits, NormalizationGapShrinks) {
    double prev = INFINITY;
    for (double p : {1e4, 1e8, 1e16}) {
        const double g = std::abs(mt_normalization_gap(p, 1.0, 0.2, 0.95));
        EXPECT_LT(g, prev) << p;
        prev = g;
    }
}
