#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hcdep/datagen.hpp"
#include "hcdep/statistics.hpp"

using namespace hcdep;

namespace {

double sample_autocorrelation(const std::vector<double>& z, std::size_t lag) {
    double m = 0;
    for (double x : z) m += x;
    m /= static_cast<double>(z.size());
    double num = 0;
    double den = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        den += (z[i] - m) * (z[i] - m);
        if (i + lag < z.size()) num += (z[i] - m) * (z[i + lag] - m);
    }
    return num / den;
}

}  // namespace

TEST(Datagen, IidAutocorrelation) {
    auto rng = rng_stream(1, 0, 0);
    const std::size_t p = 100000;
    const auto z = gen_stationary_gaussian(p, DependenceSpec::iid(), rng);
    EXPECT_LT(std::abs(sample_autocorrelation(z, 1)), 3.0 / std::sqrt(static_cast<double>(p)));
}

TEST(Datagen, Ar1Autocorrelation) {
    auto rng = rng_stream(2, 0, 0);
    const std::size_t p = 400000;
    const auto dep = DependenceSpec::ar1(0.5);
    const auto z = gen_stationary_gaussian(p, dep, rng);
    for (std::size_t k = 1; k <= 4; ++k) {
        // Bartlett variance of the lag-k estimate for AR(1).
        const double r = std::pow(0.5, k);
        const double var = ((1 + 0.25) * (1 - r * r) / (1 - 0.25) - 2 * k * r * r) / p;
        EXPECT_NEAR(sample_autocorrelation(z, k), r, 4 * std::sqrt(var)) << k;
    }
    EXPECT_THROW(DependenceSpec::ar1(1.0), DomainError);
    const auto seq = dep.rho_sequence(1000);
    EXPECT_NEAR(seq[2], 0.125, 1e-15);
    EXPECT_GE(std::abs(seq.back()), 1e-12);
    EXPECT_LT(std::abs(dep.autocorrelation(seq.size() + 1)), 1e-12);
}

TEST(Datagen, BandedFilterAndAutocorrelation) {
    const std::vector<double> band{0.4, 0.2, -0.1};
    const auto dep = DependenceSpec::banded(band);
    const auto& psi = dep.ma_filter();
    ASSERT_EQ(psi.size(), 4u);
    double s0 = 0;
    for (double c : psi) s0 += c * c;
    EXPECT_NEAR(s0, 1.0, 1e-12);
    for (std::size_t h = 1; h <= 3; ++h) {
        double g = 0;
        for (std::size_t j = 0; j + h < psi.size(); ++j) g += psi[j] * psi[j + h];
        EXPECT_NEAR(g, band[h - 1], 1e-10) << h;
    }
    auto rng = rng_stream(3, 0, 0);
    const std::size_t p = 200000;
    const auto z = gen_stationary_gaussian(p, dep, rng);
    for (std::size_t k = 1; k <= 3; ++k) EXPECT_NEAR(sample_autocorrelation(z, k), band[k - 1], 0.01);
    for (std::size_t k = 4; k <= 8; ++k)
        EXPECT_LT(std::abs(sample_autocorrelation(z, k)), 3.0 / std::sqrt(static_cast<double>(p)) * 1.5);
    EXPECT_THROW(DependenceSpec::banded({0.9, 0.9}), DomainError);
}

TEST(Datagen, Alternative) {
    EXPECT_THROW(AlternativeSpec(0.5, 0.1), DomainError);
    const AlternativeSpec alt(0.7, 0.4, SignalSign::positive);
    EXPECT_EQ(alt.signal_count(10000), 16u);
    EXPECT_NEAR(alt.magnitude(10000), std::sqrt(0.8 * std::log(1e4)), 1e-14);
    auto rng = rng_stream(4, 0, 0);
    const auto g = gen_dependent_z(10000, DependenceSpec::iid(), alt, rng);
    ASSERT_EQ(g.signals.indices.size(), 16u);
    for (std::size_t i = 1; i < g.signals.indices.size(); ++i)
        EXPECT_LT(g.signals.indices[i - 1], g.signals.indices[i]);
    for (double s : g.signals.shifts) EXPECT_DOUBLE_EQ(s, alt.magnitude(10000));
}

TEST(Datagen, MarginalValidation) {
    EXPECT_THROW(MarginalSpec::student_t(3.0, 1.0), DomainError);
    EXPECT_NO_THROW(MarginalSpec::student_t(3.5, 1.0));
    EXPECT_THROW(MarginalSpec::pareto_sym(3.0, 1.0), DomainError);
    EXPECT_THROW(MarginalSpec::student_t(5.0, 0.0), DomainError);
}

TEST(Datagen, ParetoVariance) {
    const auto marg = MarginalSpec::pareto_sym(6.0);
    auto rng = rng_stream(5, 0, 0);
    const int n = 10'000'000;
    double s = 0;
    double s2 = 0;
    double s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = marg.sample(rng);
        s += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    const double v = s2 / n;
    const double se = std::sqrt((s4 / n - v * v) / n);
    EXPECT_NEAR(v, 1.0, 3 * se);
    EXPECT_NEAR(s / n, 0.0, 4 * std::sqrt(1.0 / n));
}

TEST(Datagen, CopulaMarginals) {
    // The copula transform is the quantile function, so it must be monotone and
    // reproduce the standardized variance.
    for (const auto& marg : {MarginalSpec::student_t(5.0), MarginalSpec::pareto_sym(6.0)}) {
        double prev = -INFINITY;
        for (double z = -6; z <= 6; z += 0.5) {
            const double x = marg.from_gaussian(z);
            EXPECT_GT(x, prev);
            prev = x;
        }
        auto rng = rng_stream(6, 0, 0);
        const int n = 2'000'000;
        double s2 = 0;
        double s4 = 0;
        for (int i = 0; i < n; ++i) {
            const double x = marg.from_gaussian(rng.normal());
            s2 += x * x;
            s4 += x * x * x * x;
        }
        const double v = s2 / n;
        EXPECT_NEAR(v, 1.0, 4 * std::sqrt((s4 / n - v * v) / n)) << marg.describe();
    }
}

TEST(Datagen, GaussianPanel) {
    auto rng = rng_stream(7, 0, 0);
    const auto panel = gen_heavy_panel(4000, 5, DependenceSpec::iid(), MarginalSpec::gaussian(), std::nullopt, rng);
    for (Eigen::Index j = 0; j < 5; ++j) {
        const auto c = panel.data.col(j);
        const double v = (c.array() - c.mean()).square().sum() / 3999.0;
        EXPECT_NEAR(v, 1.0, 3 * std::sqrt(2.0 / 3999.0));
    }
}

TEST(Datagen, PanelSignalMean) {
    const std::size_t n = 200;
    const std::size_t p = 10000;
    const AlternativeSpec alt(0.6, 0.3, SignalSign::positive);
    auto rng = rng_stream(8, 0, 0);
    const auto panel = gen_heavy_panel(n, p, DependenceSpec::iid(), MarginalSpec::gaussian(), alt, rng);
    const auto t = t_statistics(panel.data);
    double mean = 0;
    for (auto j : panel.signals.indices) mean += t.t_stats[j];
    const double k = static_cast<double>(panel.signals.indices.size());
    mean /= k;
    // Noncentral t mean is mu (1 + 3/(4(n-1))) to first order; variance about 1.
    const double mu = alt.magnitude(p) * (1 + 3.0 / (4 * (n - 1.0)));
    EXPECT_NEAR(mean, mu, 3 * std::sqrt((1 + mu * mu / (2 * n)) / k));
}

TEST(Datagen, DependentPanelIsDeterministic) {
    auto a = rng_stream(9, 2, 1);
    auto b = rng_stream(9, 2, 1);
    const auto dep = DependenceSpec::ar1(0.4);
    const auto marg = MarginalSpec::student_t(5.0);
    const auto pa = gen_heavy_panel(10, 30, dep, marg, std::nullopt, a);
    const auto pb = gen_heavy_panel(10, 30, dep, marg, std::nullopt, b);
    EXPECT_TRUE(pa.data == pb.data);
}
