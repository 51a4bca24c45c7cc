#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "hcdep/parallel.hpp"
#include "hcdep/rng.hpp"

using namespace hcdep;

TEST(Rng, PhiloxKnownAnswers) {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    EXPECT_EQ(Philox4x32::apply(C{0, 0, 0, 0}, K{0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::apply(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}),
              (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::apply(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}),
              (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Rng, Determinism) {
    auto a = rng_stream(42, 3, 1);
    auto b = rng_stream(42, 3, 1);
    auto c = rng_stream(42, 4, 1);
    auto d = rng_stream(42, 3, 2);
    int same_c = 0;
    int same_d = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        same_c += x == c();
        same_d += x == d();
    }
    EXPECT_LT(same_c, 2);
    EXPECT_LT(same_d, 2);
}

TEST(Rng, UniformAndNormalMoments) {
    auto r = rng_stream(1, 0, 0);
    const int n = 1'000'000;
    double su = 0;
    double sz = 0;
    double sz2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = r.normal();
        sz += z;
        sz2 += z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 3 * std::sqrt(1.0 / 12 / n) + 1e-4);
    EXPECT_NEAR(sz / n, 0.0, 4 / std::sqrt(n));
    EXPECT_NEAR(sz2 / n, 1.0, 4 * std::sqrt(2.0 / n));
}

TEST(Rng, CrossStreamCorrelation) {
    auto a = rng_stream(9, 0, 0);
    auto b = rng_stream(9, 1, 0);
    const int n = 1'000'000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += a.normal() * b.normal();
    EXPECT_NEAR(s / n, 0.0, 3 / std::sqrt(n));
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
    auto run = [](unsigned threads) {
        std::vector<double> out(257);
        parallel_for(
            out.size(),
            [&](std::size_t i) {
                auto r = rng_stream(5, i, 0);
                out[i] = r.normal();
            },
            threads);
        return out;
    };
    EXPECT_EQ(run(1), run(4));
    EXPECT_EQ(run(1), run(7));
}

TEST(Parallel, PropagatesExceptions) {
    EXPECT_THROW(parallel_for(
                     10, [](std::size_t i) {
                         if (i == 6) throw std::runtime_error("boom");
                     },
                     3),
                 std::runtime_error);
}

TEST(Parallel, EnvironmentOverride) {
    ::setenv(kThreadsEnv, "3", 1);
    EXPECT_EQ(resolve_thread_count(0), 3u);
    EXPECT_EQ(resolve_thread_count(2), 2u);
    ::unsetenv(kThreadsEnv);
    EXPECT_GE(resolve_thread_count(0), 1u);
}
