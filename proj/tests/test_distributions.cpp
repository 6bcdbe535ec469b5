#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rpvtest/distributions.hpp"
#include "rpvtest/random.hpp"

using namespace rpvtest;

TEST(NormalQuantile, KnownValues) {
    EXPECT_EQ(dist::normal_quantile(0.5), 0.0);
    EXPECT_NEAR(dist::normal_quantile(0.975), 1.959963984540054, 1e-14);
    EXPECT_NEAR(dist::normal_quantile(0.025), -1.959963984540054, 1e-14);
    EXPECT_TRUE(std::isinf(dist::normal_quantile(0.0)));
    EXPECT_TRUE(std::isnan(dist::normal_quantile(1.5)));
}

TEST(NormalQuantile, InvertsSeriesCdfOnMinusSixToSix) {
    for (int i = 0; i <= 1200; ++i) {
        const double z = -6.0 + i * 0.01;
        const double p = static_cast<double>(oracle::series_normal_cdf(z));
        EXPECT_NEAR(dist::normal_quantile(p), z, 1e-8) << "z = " << z;
    }
}

TEST(NormalQuantile, FarTail) {
    // Phi(-10) = 7.619853024160527e-24
    EXPECT_NEAR(dist::normal_quantile(7.619853024160527e-24), -10.0, 1e-9);
}

TEST(ChiSquare, QuantilesAndTails) {
    EXPECT_NEAR(dist::chi2_quantile(0.95, 2), 5.991464547107982, 1e-12);
    EXPECT_NEAR(dist::chi2_quantile(0.95, 1), 3.841458820694126, 1e-10);
    EXPECT_NEAR(dist::chi2_sf(5.991464547107982, 2), 0.05, 1e-14);
    EXPECT_NEAR(dist::chi2_sf(3.841458820694126, 1), 0.05, 1e-12);
    EXPECT_EQ(dist::chi2_sf(0.0, 1), 1.0);
    EXPECT_EQ(dist::chi2_sf(-1.0, 1), 1.0);
    // 9.633 sits near the 99.2% point of chi-square(2).
    EXPECT_NEAR(dist::chi2_cdf(9.633, 2), 0.99190, 1e-5);
    EXPECT_THROW(dist::chi2_sf(1.0, 3), InputError);
}

TEST(Rng, UniformsInOpenIntervalAndReproducible) {
    const rng::Stream s(42, 7);
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const double u = s.uniform(i);
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
    EXPECT_EQ(s.bits(3), rng::Stream(42, 7).bits(3));
    EXPECT_NE(s.bits(3), rng::Stream(42, 8).bits(3));
    EXPECT_NE(s.bits(3), rng::Stream(43, 7).bits(3));
}

TEST(Rng, NormalDrawsHaveUnitMoments) {
    const rng::Stream s(1, 1);
    const int n = 200000;
    double m = 0.0, v = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal(i);
        m += z;
        v += z * z;
    }
    m /= n;
    v = v / n - m * m;
    EXPECT_NEAR(m, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(v, 1.0, 0.015);
}

TEST(Rng, BelowIsUniformOverRange) {
    rng::Cursor c(5, 0);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        ++counts[c.below(7)];
    }
    for (int k : counts) {
        EXPECT_NEAR(k, 10000, 400);
    }
}
