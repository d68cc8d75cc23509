#include "hrsnn/codec.hpp"
#include "hrsnn/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hrsnn;

TEST(StepForward, ConstantSignalIsSilent) {
    const std::vector<double> s(50, 3.0);
    EXPECT_EQ(sf_encode(s, 0.1).total_spikes(), 0u);
}

TEST(StepForward, HandTracedRamp) {
    const std::vector<double> s{0.0, 1.0, 2.0};
    const auto r = sf_encode(s, 0.5);
    EXPECT_FALSE(r.get(0, 0));
    EXPECT_TRUE(r.get(0, 1));
    EXPECT_TRUE(r.get(0, 2));
    EXPECT_EQ(r.total_spikes(), 2u);
    const auto rec = sf_reconstruct(r, 0.0, 0.5);
    EXPECT_DOUBLE_EQ(rec[1], 0.5);
    EXPECT_DOUBLE_EQ(rec[2], 1.0);
}

TEST(StepForward, MirroredRampBalancesChannels) {
    std::vector<double> s;
    for (int k = 0; k <= 40; ++k) s.push_back(0.1 * k);
    for (int k = 39; k >= 0; --k) s.push_back(0.1 * k);
    const auto r = sf_encode(s, 0.25);
    const auto per = r.spikes_per_neuron();
    EXPECT_GE(per[0], 15u);
    EXPECT_LE(std::max(per[0], per[1]) - std::min(per[0], per[1]), 1u);
}

TEST(StepForward, ReconstructionTracksWithinOneThreshold) {
    // A slowly varying signal moves less than one threshold per bin, which
    // the single-spike-per-bin encoder can follow.
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 0.03);
    std::vector<double> s{0.0};
    for (int k = 1; k < 2000; ++k) s.push_back(s.back() + n(rng));
    const double theta = 0.1;
    const auto rec = sf_reconstruct(sf_encode(s, theta), s[0], theta);
    for (std::size_t t = 0; t < s.size(); ++t) EXPECT_LE(std::abs(rec[t] - s[t]), theta + 1e-12);
}

TEST(StepForward, EmptySignalAndBadThreshold) {
    EXPECT_EQ(sf_encode(std::vector<double>{}, 0.1).n_bins(), 0u);
    EXPECT_THROW(sf_encode(std::vector<double>{1.0}, 0.0), InvalidArgument);
}

TEST(StepForward, MatrixFormRoutesDimensions) {
    Eigen::MatrixXd m(3, 2);
    m << 0, 2, 1, 1, 2, 0;
    const auto r = sf_encode(m, 0.5);
    ASSERT_EQ(r.n_neurons(), 4u);
    EXPECT_TRUE(r.get(0, 1));
    EXPECT_TRUE(r.get(3, 1));
    EXPECT_FALSE(r.get(1, 1));
}

TEST(RateCode, ZeroSignalIsSilent) {
    const std::vector<double> s(1000, 0.0);
    EXPECT_EQ(rate_encode(s, 200.0, 4, 1.0, 1).total_spikes(), 0u);
}

TEST(RateCode, EmpiricalRateWithinBinomialBand) {
    const std::size_t bins = 100000;
    const std::vector<double> s(bins, 1.0);
    const auto r = rate_encode(s, 200.0, 1, 1.0, 4); // 200 Hz x 1 ms = 0.2 per bin
    const double p = static_cast<double>(r.total_spikes()) / bins;
    EXPECT_NEAR(p, 0.2, 3.0 * std::sqrt(0.2 * 0.8 / bins));
}

TEST(RateCode, DeterministicAndValidated) {
    const std::vector<double> s(300, 0.4);
    EXPECT_EQ(rate_encode(s, 300.0, 3, 1.0, 7), rate_encode(s, 300.0, 3, 1.0, 7));
    EXPECT_THROW(rate_encode(std::vector<double>{1.5}, 100.0, 1, 1.0, 1), InvalidArgument);
}

TEST(RateCode, OverfullRateClamps) {
    const std::vector<double> s(100, 1.0);
    EXPECT_EQ(rate_encode(s, 5000.0, 2, 1.0, 1).total_spikes(), 200u);
}

TEST(Decoder, GammaFromLeak) {
    CodecConfig c;
    EXPECT_NEAR(c.gamma(), 0.92326, 1e-5);
    EXPECT_NEAR(std::pow(c.gamma(), 49), 0.02, 1e-12);
}

TEST(Decoder, SilentRasterDecodesToZero) {
    EXPECT_TRUE(rate_decode(SpikeRaster(3, 20, 1.0), 50, 0.9).isZero(0.0));
}

TEST(Decoder, SingleSpikeImpulseResponse) {
    const std::size_t window = 5;
    const double g = 0.8;
    SpikeRaster r(1, 20, 1.0);
    r.set(0, 4);
    const auto x = rate_decode(r, window, g);
    for (std::size_t t = 0; t < 20; ++t) {
        const double expect = (t >= 4 && t - 4 <= window) ? std::pow(g, static_cast<double>(t - 4)) : 0.0;
        EXPECT_NEAR(x(static_cast<Eigen::Index>(t), 0), expect, 1e-15) << t;
    }
}

TEST(Decoder, LinearOverDisjointNeurons) {
    std::mt19937_64 rng(5);
    std::bernoulli_distribution b(0.3);
    SpikeRaster all(6, 100, 1.0);
    for (std::size_t t = 0; t < 100; ++t)
        for (std::size_t i = 0; i < 6; ++i) all.set(i, t, b(rng));
    const auto whole = rate_decode(all, 10, 0.9);
    const auto left = rate_decode(all.select_neurons(0, 2), 10, 0.9);
    const auto right = rate_decode(all.select_neurons(2, 4), 10, 0.9);
    EXPECT_EQ(whole.leftCols(2), left);
    EXPECT_EQ(whole.rightCols(4), right);
}

TEST(Decoder, BoundedByGeometricSum) {
    const std::size_t window = 50;
    const double g = CodecConfig{}.gamma();
    SpikeRaster full(2, 200, 1.0);
    for (std::size_t t = 0; t < 200; ++t) full.set(0, t);
    const auto x = rate_decode(full, window, g);
    const double bound = (1.0 - std::pow(g, window + 1.0)) / (1.0 - g);
    EXPECT_LE(x.maxCoeff(), bound + 1e-12);
    EXPECT_NEAR(x(199, 0), bound, 1e-9);
}
