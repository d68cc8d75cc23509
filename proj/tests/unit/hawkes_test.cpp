#include "hrsnn/error.hpp"
#include "hrsnn/hawkes.hpp"
#include "hrsnn/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace hrsnn;

namespace {

HawkesConfig poisson_config(double mu_a, double mu_b) {
    HawkesConfig c;
    c.n_total = 10;
    c.alpha = 0.5;
    c.mu_a = mu_a;
    c.mu_b = mu_b;
    return c;
}

// Single population (alpha = 1) with linear self-excitation of integral a.
HawkesConfig self_exciting(double a) {
    HawkesConfig c;
    c.n_total = 1;
    c.alpha = 1.0;
    c.mu_a = 1.0;
    c.mu_b = 0.0;
    c.h1 = {{a * 1.0, 1.0}}; // x1 sums over n_total = 1 source, so the amplitude is a
    return c;
}

} // namespace

TEST(HawkesIntensity, EmptyHistoryGivesBaselines) {
    const auto c = poisson_config(1.3, 0.4);
    const auto i = intensity_at(c, {}, 2.0);
    EXPECT_DOUBLE_EQ(i.a, 1.3);
    EXPECT_DOUBLE_EQ(i.b, 0.4);
}

TEST(HawkesIntensity, SingleEventKernel) {
    auto c = poisson_config(1.0, 0.0);
    c.h1 = {{0.6, 2.0}};
    EventRecord h;
    h.a_times = {1.0};
    h.a_units = {0};
    const double s = 0.3;
    const auto i = intensity_at(c, h, 1.0 + s);
    EXPECT_NEAR(i.a - 1.0, 0.6 * 2.0 * std::exp(-2.0 * s) / 10.0, 1e-14);
}

TEST(HawkesIntensity, InhibitionIsMultiplicative) {
    auto c = poisson_config(2.0, 1.0);
    c.h2 = {{3.0, 1.0}};
    EventRecord h;
    for (int k = 0; k < 20; ++k) {
        h.b_times.push_back(0.01 * k);
        h.b_units.push_back(static_cast<std::uint32_t>(k % 5));
    }
    const auto i = intensity_at(c, h, 0.25);
    EXPECT_LT(i.a, 2.0);
    EXPECT_GT(i.a, 0.0);
    double x2 = 0.0;
    for (int k = 0; k < 20; ++k) x2 += 3.0 * 1.0 * std::exp(-1.0 * (0.25 - 0.01 * k));
    x2 /= 10.0;
    EXPECT_NEAR(i.a, 2.0 * std::exp(-x2), 1e-12);
}

TEST(HawkesSim, PoissonBaselineRate) {
    const auto c = poisson_config(1.0, 0.0);
    const double T = 1e4;
    const auto ev = simulate_hawkes(c, T, 3);
    const double n_a = 5.0;
    const double rate = static_cast<double>(ev.a_times.size()) / (n_a * T);
    EXPECT_NEAR(rate, 1.0, 3.0 * std::sqrt(1.0 / (n_a * T)));
    EXPECT_TRUE(ev.b_times.empty());
    for (std::size_t k = 1; k < ev.a_times.size(); ++k) EXPECT_LT(ev.a_times[k - 1], ev.a_times[k]);
}

TEST(HawkesSim, InterEventTimesAreExponential) {
    auto c = poisson_config(0.5, 0.0);
    c.n_total = 2;
    const auto ev = simulate_hawkes(c, 1.2e4, 8);
    ASSERT_GT(ev.a_times.size(), 5000u);
    std::vector<double> gaps;
    for (std::size_t k = 1; k < ev.a_times.size(); ++k) gaps.push_back(ev.a_times[k] - ev.a_times[k - 1]);
    EXPECT_GT(ks_test_exponential(gaps, 0.5).p_value, 0.01);
}

TEST(HawkesSim, StationaryRateOfLinearSelfExcitation) {
    const auto ev = simulate_hawkes(self_exciting(0.5), 1e4, 5);
    const double rate = static_cast<double>(ev.a_times.size()) / 1e4;
    EXPECT_NEAR(rate, 2.0, 0.1);
}

TEST(HawkesSim, InhibitionReducesExcitatoryRate) {
    auto base = poisson_config(1.0, 0.5);
    base.h4 = {{1.0, 1.0}};
    auto inhibited = base;
    inhibited.h2 = {{2.0, 1.0}};
    std::vector<double> r0, r1;
    for (std::uint64_t s = 0; s < 10; ++s) {
        r0.push_back(static_cast<double>(simulate_hawkes(base, 500.0, s).a_times.size()));
        r1.push_back(static_cast<double>(simulate_hawkes(inhibited, 500.0, s).a_times.size()));
    }
    EXPECT_LT(paired_t_test_greater(r0, r1).p_value, 0.05);
    EXPECT_LT(mean(r1), mean(r0));
}

TEST(HawkesSim, DeterministicAndZeroBaseline) {
    auto c = poisson_config(1.0, 0.5);
    c.h1 = {{0.3, 1.0}};
    c.h4 = {{0.5, 2.0}};
    const auto a = simulate_hawkes(c, 200.0, 4), b = simulate_hawkes(c, 200.0, 4);
    EXPECT_EQ(a.a_times, b.a_times);
    EXPECT_EQ(a.b_units, b.b_units);
    EXPECT_EQ(simulate_hawkes(poisson_config(0.0, 0.0), 100.0, 1).a_times.size(), 0u);
}

TEST(HawkesSim, SupercriticalIsNumericalError) {
    auto c = self_exciting(1.5);
    c.max_events = 200000;
    try {
        simulate_hawkes(c, 1e5, 1);
        FAIL() << "expected a runaway error";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("branching"), std::string::npos);
    }
}

TEST(HawkesSpecSampling, PerUnitKernelsHaveMatchedMean) {
    HawkesSpec s;
    s.n_total = 2000;
    s.h1.amplitude = DistributionSpec::lognormal_with_mean(0.8, 1.0);
    const auto c = s.sample(3);
    ASSERT_EQ(c.h1.size(), c.n_a());
    double m = 0.0;
    for (const auto& k : c.h1) m += k.amplitude;
    EXPECT_NEAR(m / static_cast<double>(c.h1.size()), 0.8, 0.1);
}

TEST(Sparsity, DegenerateArmsMatch) {
    HawkesSpec h;
    h.n_total = 20;
    h.mu_b = 0.2;
    h.h1.amplitude = DistributionSpec::degenerate(0.4);
    h.h2.amplitude = DistributionSpec::degenerate(1.0);
    const auto r = compare_sparsity(h, h, 200.0, 5, 1);
    EXPECT_EQ(r.rates_m, r.rates_r);
    EXPECT_DOUBLE_EQ(r.phi_m, r.phi_r);
}

TEST(Sparsity, ParallelWorkersGiveSameRates) {
    HawkesSpec hom, het;
    hom.n_total = het.n_total = 20;
    hom.h1.amplitude = DistributionSpec::degenerate(0.4);
    het.h1.amplitude = DistributionSpec::lognormal_with_mean(0.4, 1.0);
    const auto a = compare_sparsity(hom, het, 100.0, 4, 2, 1);
    const auto b = compare_sparsity(hom, het, 100.0, 4, 2, 3);
    EXPECT_EQ(a.rates_r, b.rates_r);
}

TEST(Sparsity, EventsCsv) {
    EventRecord e;
    e.a_times = {0.5};
    e.a_units = {0};
    e.b_times = {0.25};
    e.b_units = {0};
    std::ostringstream os;
    write_events_csv(os, e);
    EXPECT_EQ(os.str(), "population,time\nB,0.25\nA,0.5\n");
}
