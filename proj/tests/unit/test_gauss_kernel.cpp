#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hcdep/gauss_kernel.hpp"

using namespace hcdep;

namespace {

// Independent oracle: bisection on the CDF.
double bisect_quantile(double u) {
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std_cdf(mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Oracle for the bivariate density written out from the definition.
double biv_pdf_oracle(double x, double y, double r) {
    const double det = 1.0 - r * r;
    return std::exp(-(x * x - 2 * r * x * y + y * y) / (2 * det)) / (2 * std::numbers::pi * std::sqrt(det));
}

}  // namespace

TEST(GaussKernel, ScalarBasics) {
    EXPECT_DOUBLE_EQ(std_cdf(0.0), 0.5);
    EXPECT_NEAR(std_pdf(0.0), 0.3989422804014327, 1e-16);
    EXPECT_NEAR(std_quantile(0.975), 1.959963984540054, 1e-12);
    EXPECT_NEAR(std_quantile(0.975), bisect_quantile(0.975), 1e-12);
    EXPECT_THROW(std_quantile(0.0), DomainError);
    EXPECT_THROW(std_quantile(1.0), DomainError);
}

TEST(GaussKernel, QuantileRoundTrip) {
    // Above x = 0, std_cdf(x) rounds to a multiple of 2^-53 near 1, so the
    // upper half is checked through the exactly representable tail.
    for (double x = -8.0; x <= 0.0; x += 0.125) EXPECT_NEAR(std_quantile(std_cdf(x)), x, 1e-12) << x;
    for (double x = 0.0; x <= 8.0; x += 0.125) EXPECT_NEAR(-std_quantile(std_sf(x)), x, 1e-12) << x;
    for (double x = 0.0; x <= 4.0; x += 0.125) EXPECT_NEAR(std_quantile(std_cdf(x)), x, 1e-12) << x;
    for (double u : {1e-300, 1e-100, 1e-20, 1e-6, 0.3, 0.5, 0.7, 0.999999})
        EXPECT_NEAR(std_quantile(u), bisect_quantile(u), 1e-9 * std::max(1.0, std::abs(bisect_quantile(u))));
}

TEST(GaussKernel, Pi0) {
    EXPECT_DOUBLE_EQ(pi0(0.0), 1.0);
    EXPECT_NEAR(pi0(1.959963984540054), 0.05, 1e-14);
    EXPECT_THROW(pi0(-0.1), DomainError);
    for (double l = 0.0; l < 10.0; l += 0.25) EXPECT_GT(pi0(l), pi0(l + 0.25));
    const auto g = pi0_guarded(40.0);
    EXPECT_TRUE(g.underflow);
    EXPECT_GT(g.value, 0.0);
    EXPECT_FALSE(pi0_guarded(5.0).underflow);
}

TEST(GaussKernel, Sigma0Hc) {
    EXPECT_DOUBLE_EQ(sigma0_sq_hc(0.0), 0.0);
    EXPECT_NEAR(sigma0_sq_hc(hc_lambda_from_alpha(0.5)), 0.25, 1e-15);
    const double q = 2.0 * (1.0 - 0.8413447460685429);
    EXPECT_NEAR(pi0(1.0), 0.3173105078629141, 1e-15);
    EXPECT_NEAR(sigma0_sq_hc(1.0), q * (1 - q), 1e-14);
}

TEST(GaussKernel, HcLambdaFromAlpha) {
    EXPECT_NEAR(hc_lambda_from_alpha(0.05), 1.959963984540054, 1e-12);
    for (double a : {1e-6, 0.01, 0.5}) EXPECT_NEAR(pi0(hc_lambda_from_alpha(a)), a, 1e-10 * a);
    EXPECT_LT(hc_lambda_from_alpha(1.0 - 1e-9), 1e-8);
}

TEST(GaussKernel, MtMoments) {
    EXPECT_THROW(MtMomentParams(2.0, 2.0), DomainError);
    EXPECT_THROW(MtMomentParams(-1.0, 2.0), DomainError);
    EXPECT_NEAR(mu0_mt({0.0, 40.0}), 1.0, 1e-14);
    EXPECT_NEAR(sigma0_sq_mt({0.0, 40.0}), 2.0, 1e-13);
    for (double m : {2.0, 3.0, 4.3}) {
        const double lo = mt_decreasing_lower_bound(m);
        for (double l = lo; l + 0.01 < m; l += 0.01) {
            EXPECT_GE(sigma0_sq_mt({l, m}), sigma0_sq_mt({l + 0.01, m}));
            EXPECT_GE(mu0_mt({l, m}), mu0_mt({l + 0.01, m}));
            EXPECT_GE(sigma0_sq_mt({l, m}), 0.0);
        }
    }
    const MtMomentParams q(1.2, 3.1);
    EXPECT_NEAR(mu0_mt(q) + 2 * (3.1 * std_pdf(3.1) - 1.2 * std_pdf(1.2)) + 2 * (std_cdf(1.2) - std_cdf(3.1)), 0.0,
                1e-15);
}

TEST(GaussKernel, MtMomentsQuadratureOracle) {
    // E Z^2 1{l<=|Z|<=M} and E Z^4 1{...} by fine trapezoid integration.
    for (auto [l, m] : {std::pair{1.0, 2.0}, {1.0, 3.0}, {2.0, 4.2919}}) {
        const int n = 200000;
        const double h = (m - l) / n;
        double e2 = 0.0;
        double e4 = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double x = l + h * i;
            const double w = (i == 0 || i == n) ? 0.5 : 1.0;
            e2 += w * x * x * std_pdf(x);
            e4 += w * x * x * x * x * std_pdf(x);
        }
        e2 *= 2 * h;
        e4 *= 2 * h;
        EXPECT_NEAR(mu0_mt({l, m}), e2, 1e-9);
        EXPECT_NEAR(sigma0_sq_mt({l, m}), e4 - e2 * e2, 1e-9);
    }
}

TEST(GaussKernel, MtLambdaFromAlpha) {
    const double m = std::sqrt(2 * std::log(1e4));
    EXPECT_NEAR(mt_lambda_from_alpha(sigma0_sq_mt({1.5, m}), m), 1.5, 1e-8);
    EXPECT_NEAR(mt_lambda_from_alpha(sigma0_sq_mt({2.0, m}), m), 2.0, 1e-8);
    const double a = sigma0_sq_mt({m - 1e-3, m}) * 1.0001;
    EXPECT_GT(mt_lambda_from_alpha(a, m), m - 0.01);
    const double top = sigma0_sq_mt({mt_decreasing_lower_bound(m), m});
    EXPECT_THROW(mt_lambda_from_alpha(top * 1.01, m), BracketError);
    try {
        mt_lambda_from_alpha(top * 1.01, m);
    } catch (const BracketError& e) {
        EXPECT_NEAR(e.hi(), top, 1e-12);
    }
}

TEST(GaussKernel, BivariateCdf) {
    EXPECT_THROW(BivariateNormalParams(0, 0, 1.0), DomainError);
    EXPECT_THROW(BivariateNormalParams(0, 0, -1.0), DomainError);
    EXPECT_NEAR(biv_cdf({0.3, -0.7, 0.0}), std_cdf(0.3) * std_cdf(-0.7), 1e-15);
    for (double r : {-0.9, -0.5, 0.0, 0.2, 0.7, 0.95})
        EXPECT_NEAR(biv_cdf({0, 0, r}), 0.25 + std::asin(r) / (2 * std::numbers::pi), 1e-10) << r;
    for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0})
        for (double y : {-2.0, -1.0, 0.0, 1.0, 2.0})
            for (double r : {-0.8, -0.3, 0.0, 0.3, 0.8}) {
                const double h = 1e-5;
                const double fd = (biv_cdf({x, y, r + h}) - biv_cdf({x, y, r - h})) / (2 * h);
                EXPECT_NEAR(fd, biv_pdf_oracle(x, y, r), 1e-6);
                EXPECT_NEAR(biv_pdf(x, y, r), biv_pdf_oracle(x, y, r), 1e-15);
            }
}

TEST(GaussKernel, BivariateCdfMonteCarlo) {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> nd;
    const int n = 2'000'000;
    const double r = 0.6;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        const double a = nd(gen);
        const double b = r * a + std::sqrt(1 - r * r) * nd(gen);
        hits += (a <= 0.5 && b <= -0.4);
    }
    const double ph = static_cast<double>(hits) / n;
    EXPECT_NEAR(biv_cdf({0.5, -0.4, r}), ph, 4 * std::sqrt(ph * (1 - ph) / n));
}

TEST(GaussKernel, PsiTail) {
    for (double l = 0.25; l <= 2.5; l += 0.25)
        for (double n = 0.25; n <= 2.5; n += 0.25) EXPECT_NEAR(psi_tail(l, n, 0.0), pi0(l) * pi0(n), 1e-10);
    for (double r : {-0.7, 0.0, 0.4}) EXPECT_NEAR(psi_tail(0, 0, r), 1.0, 1e-10);
    for (double x : {0.0, 1.0, 2.0})
        for (double y : {0.0, 1.0, 2.0})
            for (double r : {-0.8, -0.3, 0.0, 0.3, 0.8}) {
                const double h = 1e-5;
                const double fd = (psi_tail(x, y, r + h) - psi_tail(x, y, r - h)) / (2 * h);
                EXPECT_NEAR(psi_density(x, y, r), fd, 1e-6);
                EXPECT_NEAR(psi_tail_increment(x, y, r), psi_tail(x, y, r) - pi0(x) * pi0(y), 1e-10);
            }
}

TEST(GaussKernel, PsiTailMonteCarlo) {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd;
    const int n = 2'000'000;
    const double r = 0.3;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        const double a = nd(gen);
        const double b = r * a + std::sqrt(1 - r * r) * nd(gen);
        hits += (std::abs(a) >= 1.0 && std::abs(b) >= 1.5);
    }
    const double ph = static_cast<double>(hits) / n;
    EXPECT_NEAR(psi_tail(1.0, 1.5, r), ph, 4 * std::sqrt(ph * (1 - ph) / n));
}
