#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hcdep/datagen.hpp"
#include "hcdep/gp_sim.hpp"

using namespace hcdep;

TEST(GpSim, LogitGrid) {
    const LevelRange r(0.01, 0.5);
    const auto g = LogitGrid::logit_uniform(r, 9);
    EXPECT_EQ(g.levels().front(), 0.01);
    EXPECT_EQ(g.levels().back(), 0.5);
    for (std::size_t k = 1; k < g.size(); ++k) EXPECT_GT(g.levels()[k], g.levels()[k - 1]);
    const double step = g.logits()[1] - g.logits()[0];
    for (std::size_t k = 2; k < g.size(); ++k) EXPECT_NEAR(g.logits()[k] - g.logits()[k - 1], step, 1e-12);
    EXPECT_THROW(LogitGrid::from_levels({0.2, 0.1}), DomainError);
}

TEST(GpSim, BridgeCorrelationIdentity) {
    for (auto [a, b] : {std::pair{0.1, 0.3}, {0.01, 0.5}, {0.2, 0.21}}) {
        const double via_logit = std::exp(-0.5 * std::abs(logit(a) - logit(b)));
        EXPECT_NEAR(bridge_correlation(a, b), via_logit, 1e-14);
        // Brownian bridge: cov s(1-t), var s(1-s).
        const double bb = a * (1 - b) / std::sqrt(a * (1 - a) * b * (1 - b));
        EXPECT_NEAR(bridge_correlation(a, b), bb, 1e-14);
    }
}

TEST(GpSim, SinglePointGridIsStandardNormal) {
    const auto g = LogitGrid::logit_uniform(LevelRange(0.1, 0.2), 1);
    const int n = 200000;
    double s = 0;
    double s2 = 0;
    for (int i = 0; i < n; ++i) {
        auto rng = rng_stream(1, static_cast<std::uint64_t>(i), 0);
        const double x = bridge_sup_sample(g, rng);
        s += x;
        s2 += x * x;
    }
    EXPECT_NEAR(s / n, 0.0, 4 / std::sqrt(n));
    EXPECT_NEAR(s2 / n, 1.0, 4 * std::sqrt(2.0 / n));
}

TEST(GpSim, BridgePathCovariance) {
    const auto g = LogitGrid::from_levels({0.1, 0.3});
    const int n = 100000;
    double sxy = 0;
    double sxy2 = 0;
    for (int i = 0; i < n; ++i) {
        auto rng = rng_stream(2, static_cast<std::uint64_t>(i), 0);
        const auto u = bridge_path_sample(g, rng);
        sxy += u[0] * u[1];
        sxy2 += u[0] * u[0] * u[1] * u[1];
    }
    const double c = sxy / n;
    const double se = std::sqrt((sxy2 / n - c * c) / n);
    EXPECT_NEAR(c, bridge_correlation(0.1, 0.3), 3 * se);
}

TEST(GpSim, FinerGridDominates) {
    const LevelRange r(0.001, 0.5);
    const auto coarse = LogitGrid::logit_uniform(r, 65);
    const auto fine = LogitGrid::logit_uniform(r, 129);
    double mc = 0;
    double mf = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        // Same underlying path: the fine grid contains the coarse one, sampled
        // through the path at fine resolution.
        auto rng = rng_stream(3, static_cast<std::uint64_t>(i), 0);
        const auto u = bridge_path_sample(fine, rng);
        double bc = -INFINITY;
        double bf = -INFINITY;
        for (std::size_t k = 0; k < u.size(); ++k) {
            bf = std::max(bf, u[k]);
            if (k % 2 == 0) bc = std::max(bc, u[k]);
        }
        EXPECT_GE(bf, bc);
        mc += bc;
        mf += bf;
    }
    EXPECT_GE(mf, mc);
    EXPECT_NEAR(coarse.levels()[1], fine.levels()[2], 1e-15);
}

TEST(GpSim, IndependentKernel) {
    const std::vector<double> lam{0.5, 1.0, 2.0, 3.0};
    const auto c = hc_cov_independent(lam);
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(c.matrix(i, i), 1.0, 1e-10);
    EXPECT_NEAR(c.matrix(0, 2), pi0(2.0) * (1 - pi0(0.5)) / std::sqrt(sigma0_sq_hc(0.5) * sigma0_sq_hc(2.0)), 1e-15);
    const std::vector<double> zeros(10, 0.0);
    EXPECT_LT(cov_discrepancy(hc_cov_dependent(lam, zeros, 1000), c), 1e-10);
    EXPECT_DOUBLE_EQ(cov_discrepancy(c, c), 0.0);
}

TEST(GpSim, DependentAgainstMonteCarlo) {
    // Ten-variable MA(1) sequence with rho_1 = 0.45; the covariance of the
    // normalized exceedance sums, estimated from simulated sequences.
    const long p = 10;
    const double l = 1.0;
    const double nu = 1.5;
    const std::vector<double> rho{0.45};
    const std::vector<double> grid{l, nu};
    const auto c = hc_cov_dependent(grid, rho, p);
    const auto dep = DependenceSpec::banded(rho);
    const int reps = 1'000'000;
    const double ea = p * pi0(l);
    const double eb = p * pi0(nu);
    double sd = 0;
    double sd2 = 0;
    for (int i = 0; i < reps; ++i) {
        auto rng = rng_stream(4, static_cast<std::uint64_t>(i), 0);
        const auto z = gen_stationary_gaussian(static_cast<std::size_t>(p), dep, rng);
        double a = 0;
        double b = 0;
        for (double x : z) {
            a += std::abs(x) >= l;
            b += std::abs(x) >= nu;
        }
        const double d = (a - ea) * (b - eb) / p;
        sd += d;
        sd2 += d * d;
    }
    const double mean = sd / reps;
    const double se = std::sqrt((sd2 / reps - mean * mean) / reps);
    const double norm = std::sqrt(sigma0_sq_hc(l) * sigma0_sq_hc(nu));
    EXPECT_NEAR(mean / norm, c.matrix(0, 1), 3 * se / norm);
    EXPECT_GT(c.matrix(0, 0), 1.0);
}

TEST(GpSim, BlockCovariance) {
    const std::vector<double> lam{1.0, 2.0};
    const std::vector<double> zeros(3, 0.0);
    const auto blk0 = hc_cov_block(lam, zeros, 50, 5, 10);
    const auto ind = hc_cov_independent(lam);
    EXPECT_NEAR((blk0.matrix - ind.matrix * (50.0 / 55.0)).cwiseAbs().maxCoeff(), 0.0, 1e-12);

    const auto rho = DependenceSpec::ar1(0.5).rho_sequence(200);
    const long a2 = 2;
    const long m = 5;
    double prev = INFINITY;
    for (long a1 : {4, 16, 64, 256}) {
        const long p = m * (a1 + a2);
        const double d = cov_discrepancy(hc_cov_dependent(lam, rho, p), hc_cov_block(lam, rho, a1, a2, m));
        EXPECT_LT(d, prev) << a1;
        prev = d;
    }
    EXPECT_THROW(hc_cov_block(lam, rho, 1, 2, 5), DomainError);
    EXPECT_THROW(hc_cov_block(lam, rho, 4, 2, 2), DomainError);
}

TEST(GpSim, DiscrepancySymmetricAndDecreasing) {
    const auto rho = DependenceSpec::ar1(0.3).rho_sequence(1000);
    double prev = INFINITY;
    for (double d : {2.0, 3.0, 4.0}) {
        const LevelRange r = level_range_loglog(1e6, 1.0, d);
        const auto grid = LogitGrid::logit_uniform(r, 12);
        std::vector<double> lam;
        for (double a : grid.levels()) lam.push_back(hc_lambda_from_alpha(a));
        const auto dep = hc_cov_dependent(lam, rho, 1000000);
        const auto ind = hc_cov_independent(lam);
        const double x = cov_discrepancy(dep, ind);
        EXPECT_DOUBLE_EQ(x, cov_discrepancy(ind, dep));
        EXPECT_LT(x, prev);
        prev = x;
    }
}

TEST(GpSim, MtLimitCovariance) {
    const double m = std::sqrt(2 * std::log(1e4));
    const std::vector<double> grid{1.5, 2.0, 2.5, 3.0};
    const auto c = mt_limit_cov(grid, m);
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(c.matrix(i, i), 1.0, 1e-12);
    EXPECT_NEAR((c.matrix - c.matrix.transpose()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
    EXPECT_THROW(mt_limit_cov(std::vector<double>{0.01}, 2.0), DomainError);
    const GaussianMaxSampler s(c.matrix);
    const Eigen::MatrixXd rec = s.factor() * s.factor().transpose();
    EXPECT_LT((rec - c.matrix).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(GpSim, MtTwoPointCorrelation) {
    const double m = 3.5;
    const std::vector<double> grid{1.8, 2.4};
    const double target = mt_limit_cov(grid, m).matrix(0, 1);
    const GaussianMaxSampler s(mt_limit_cov(grid, m).matrix);
    const int n = 100000;
    double sxy = 0;
    double sxy2 = 0;
    for (int i = 0; i < n; ++i) {
        auto rng = rng_stream(5, static_cast<std::uint64_t>(i), 0);
        const auto v = s.sample_vector(rng);
        sxy += v(0) * v(1);
        sxy2 += v(0) * v(0) * v(1) * v(1);
    }
    const double c = sxy / n;
    EXPECT_NEAR(c, target, 3 * std::sqrt((sxy2 / n - c * c) / n));
}

TEST(GpSim, CholeskyJitterAndFailure) {
    Eigen::MatrixXd singular = Eigen::MatrixXd::Ones(3, 3);
    const GaussianMaxSampler s(singular);
    EXPECT_GT(s.jitter(), 0.0);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
    bad(0, 1) = bad(1, 0) = 2.0;
    try {
        GaussianMaxSampler b(bad);
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("-1"), std::string::npos) << e.what();
    }
}
