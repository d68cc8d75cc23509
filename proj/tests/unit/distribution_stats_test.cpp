#include "hrsnn/distribution.hpp"
#include "hrsnn/error.hpp"
#include "hrsnn/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hrsnn;

TEST(Distribution, MomentsOfEachFamily) {
    EXPECT_DOUBLE_EQ(DistributionSpec::normal(2.0, 3.0).variance(), 9.0);
    EXPECT_DOUBLE_EQ(DistributionSpec::gamma(2.0, 3.0).mean(), 6.0);
    EXPECT_DOUBLE_EQ(DistributionSpec::gamma(2.0, 3.0).variance(), 18.0);
    EXPECT_NEAR(DistributionSpec::lognormal_with_mean(0.8, 2.0).mean(), 0.8, 1e-12);
    EXPECT_EQ(DistributionSpec::degenerate(4.0).variance(), 0.0);
}

TEST(Distribution, QuantileInvertsCdfAtMedian) {
    EXPECT_NEAR(DistributionSpec::normal(1.0, 2.0).quantile(0.5), 1.0, 1e-12);
    EXPECT_NEAR(DistributionSpec::lognormal_with_mean(1.0, 0.5).quantile(0.5), std::exp(-0.125), 1e-12);
}

TEST(Distribution, InvalidParametersRejected) {
    EXPECT_THROW(DistributionSpec::normal(0.0, -1.0).validate(), ConfigError);
    EXPECT_THROW(DistributionSpec::gamma(0.0, 1.0).validate(), ConfigError);
    EXPECT_THROW(DistributionSpec::normal(0.0, 1.0).with_support(2.0, 1.0).validate(), ConfigError);
}

TEST(Distribution, SamplesRespectSupport) {
    Rng rng(1);
    const auto d = DistributionSpec::normal(0.0, 1.0).with_support(0.5, 1.0);
    for (double x : sample_n(d, 2000, rng)) {
        EXPECT_GE(x, 0.5);
        EXPECT_LE(x, 1.0);
    }
}

TEST(Distribution, UnreachableSupportGivesUp) {
    Rng rng(1);
    const auto d = DistributionSpec::normal(0.0, 1.0).with_support(50.0, 51.0);
    EXPECT_THROW(sample(d, rng), ConfigError);
}

TEST(Stats, PairedTestDetectsShift) {
    const std::vector<double> a{1.1, 2.2, 3.1, 4.3, 5.2}, b{1.0, 2.0, 3.0, 4.0, 5.0};
    EXPECT_LT(paired_t_test_greater(a, b).p_value, 0.01);
    EXPECT_GT(paired_t_test_greater(b, a).p_value, 0.99);
}

TEST(Stats, PairedTestMatchesReferenceValue) {
    // differences 1, 2, 3, 4 -> mean 2.5, sd 1.29099, t = 3.87298, df 3,
    // one-sided p = 0.0152331 (Student t tail)
    const std::vector<double> a{1, 2, 3, 4}, b{0, 0, 0, 0};
    const auto r = paired_t_test_greater(a, b);
    EXPECT_NEAR(r.statistic, 3.872983346207417, 1e-12);
    EXPECT_NEAR(r.p_value, 0.015233145831085489, 1e-9);
}

TEST(Stats, KsAcceptsExponentialQuantiles) {
    std::vector<double> xs;
    for (int k = 0; k < 1000; ++k) xs.push_back(-std::log(1.0 - (k + 0.5) / 1000.0) / 2.0);
    EXPECT_GT(ks_test_exponential(xs, 2.0).p_value, 0.99);
    EXPECT_LT(ks_test_exponential(xs, 1.0).p_value, 1e-6);
}
