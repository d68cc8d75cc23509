#include "hrsnn/datagen.hpp"
#include "hrsnn/metrics.hpp"
#include "hrsnn/pipeline.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace hrsnn;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
    return m;
}

} // namespace

TEST(Capacity, DelayLineOracle) {
    const auto u = iid_uniform(4000, 1);
    const auto states = delay_line_states(u, 10);
    const auto r = memory_capacity(states, u, {});
    ASSERT_EQ(r.per_delay.size(), 100u);
    for (std::size_t tau = 1; tau <= 100; ++tau) {
        if (tau <= 10) EXPECT_GE(r.per_delay[tau - 1], 0.99) << tau;
        else EXPECT_LE(r.per_delay[tau - 1], 0.05) << tau;
    }
    EXPECT_GE(r.total, 9.5);
    EXPECT_LE(r.total, 10.5);
}

TEST(Capacity, IndependentStatesCarryNoMemory) {
    const auto u = iid_uniform(4000, 2);
    const auto r = memory_capacity(random_matrix(4000, 10, 3), u, {});
    for (double c : r.per_delay) EXPECT_LE(c, 0.05);
}

TEST(Capacity, PresentInputDoesNotPredictPast) {
    const auto u = iid_uniform(4000, 4);
    Eigen::MatrixXd states(4000, 1);
    for (int t = 0; t < 4000; ++t) states(t, 0) = u[static_cast<std::size_t>(t)];
    const auto r = memory_capacity(states, u, {});
    for (double c : r.per_delay) EXPECT_LE(c, 0.05);
}

TEST(Capacity, EachDelayIsAClampedCorrelation) {
    const auto u = iid_uniform(1500, 5);
    const auto states = (delay_line_states(u, 4) + 0.5 * random_matrix(1500, 4, 6)).eval();
    const auto r = memory_capacity(states, u, {20, 1e-6, 0.7, 0, false, 0});
    double sum = 0.0;
    for (double c : r.per_delay) {
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0);
        sum += c;
    }
    EXPECT_DOUBLE_EQ(sum, r.total);
}

TEST(Capacity, ConstantStatesScoreZero) {
    const auto u = iid_uniform(800, 7);
    const auto r = memory_capacity(Eigen::MatrixXd::Ones(800, 3), u, {10, 1e-6, 0.7, 0, false, 0});
    EXPECT_EQ(r.total, 0.0);
}

TEST(Capacity, TooLittleDataIsDataError) {
    const auto u = iid_uniform(50, 7);
    EXPECT_THROW(memory_capacity(delay_line_states(u, 3), u, {}), DataError);
}

TEST(Capacity, CsvHasHeaderAndTotal) {
    CapacityReport r{{0.5, 0.25}, 0.75, 2};
    std::ostringstream os;
    write_capacity_csv(os, r);
    EXPECT_EQ(os.str(), "tau,c_tau\n1,0.5\n2,0.25\ntotal,0.75\n");
}

TEST(Efficiency, Arithmetic) {
    EXPECT_DOUBLE_EQ(spike_efficiency(10.0, 5.0).efficiency, 2.0);
    SpikeRaster r(4, 10, 1.0);
    for (std::size_t i = 0; i < 4; ++i) r.set(i, 1);
    CapacityReport c{{}, 3.0, 0};
    const double e1 = spike_efficiency(c, r).efficiency;
    for (std::size_t i = 0; i < 4; ++i) r.set(i, 5);
    EXPECT_DOUBLE_EQ(spike_efficiency(c, r).efficiency, e1 / 2.0);
    EXPECT_THROW(spike_efficiency(c, SpikeRaster(4, 10, 1.0)), EfficiencyUndefined);
}

TEST(Heterogeneity, IdenticalRowsAreDegenerate) {
    const Eigen::MatrixXd m = Eigen::MatrixXd::Ones(20, 3);
    const auto h = heterogeneity_entropy(m);
    EXPECT_TRUE(h.degenerate);
    EXPECT_NEAR(h.log_det, 3.0 * std::log(1e-9), 1e-6);
}

TEST(Heterogeneity, UnitVarianceNearZero) {
    const auto h = heterogeneity_entropy(random_matrix(200000, 3, 8));
    EXPECT_NEAR(h.log_det, 0.0, 0.03);
}

TEST(Heterogeneity, ScalingShiftsByTwoNLogC) {
    const auto m = random_matrix(500, 3, 9);
    const double c = 2.5;
    EXPECT_NEAR(heterogeneity_entropy(c * m).log_det - heterogeneity_entropy(m).log_det, 6.0 * std::log(c), 1e-6);
}

TEST(Heterogeneity, TooFewSamplesRejected) {
    EXPECT_THROW(heterogeneity_entropy(random_matrix(3, 3, 1)), DataError);
}

TEST(EigenHeterogeneity, ReferenceSpectra) {
    EXPECT_NEAR(eigen_heterogeneity(Eigen::Matrix2d::Identity()), 0.5, 1e-12);
    Eigen::Matrix2d one;
    one << 3, 0, 0, 0;
    EXPECT_NEAR(eigen_heterogeneity(one), 1.0, 1e-12);
    EXPECT_NEAR(eigen_heterogeneity(Eigen::MatrixXd::Identity(7, 7)), 1.0 / 7.0, 1e-12);
    EXPECT_THROW(eigen_heterogeneity(Eigen::Matrix2d::Zero()), Error);
}

TEST(Covariance, MatchesTwoPassOracle) {
    const auto s = random_matrix(100, 5, 13);
    const auto c = state_covariance(s);
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
            double ma = 0, mb = 0;
            for (int t = 0; t < 100; ++t) {
                ma += s(t, a);
                mb += s(t, b);
            }
            ma /= 100;
            mb /= 100;
            double acc = 0;
            for (int t = 0; t < 100; ++t) acc += (s(t, a) - ma) * (s(t, b) - mb);
            EXPECT_NEAR(c(a, b), acc / 99.0, 1e-12);
        }
    EXPECT_TRUE(state_covariance(Eigen::MatrixXd::Ones(10, 3)).isZero(0.0));
}

TEST(Covariance, PerfectlyCorrelatedPair) {
    const auto base = random_matrix(300, 1, 14);
    Eigen::MatrixXd s(300, 2);
    s.col(0) = base.col(0);
    s.col(1) = 3.0 * base.col(0);
    const auto c = state_covariance(s);
    EXPECT_NEAR(c(0, 1), std::sqrt(c(0, 0) * c(1, 1)), 1e-10);
}

TEST(Covariance, CorrelationRaisesSquaredCovarianceSum) {
    // states with pairwise correlation rho at fixed unit variance
    double prev = -1.0;
    for (double rho : {0.0, 0.3, 0.6, 0.9}) {
        const auto shared = random_matrix(5000, 1, 15);
        const auto own = random_matrix(5000, 4, 16);
        const Eigen::MatrixXd s = std::sqrt(rho) * shared.replicate(1, 4) + std::sqrt(1 - rho) * own;
        const double sum = state_covariance(s).array().square().sum();
        EXPECT_GT(sum, prev);
        prev = sum;
    }
}

TEST(FiringRate, HertzFromBins) {
    SpikeRaster r(1, 1000, 1.0); // 1 s of 1 ms bins
    for (std::size_t t = 0; t < 1000; t += 10) r.set(0, t);
    EXPECT_NEAR(avg_firing_rate(r, 100)[0], 100.0, 1e-9);
}

TEST(Nrmse, ZeroForPerfectPrediction) {
    const auto y = random_matrix(20, 2, 3);
    EXPECT_EQ(nrmse(y, y), 0.0);
    EXPECT_GT(nrmse(y * 0.0, y), 0.5);
}
