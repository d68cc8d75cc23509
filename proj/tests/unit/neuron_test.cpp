#include "hrsnn/error.hpp"
#include "hrsnn/neuron.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hrsnn;

namespace {

NeuronParams unit_params(double tau_m = 10.0, double t_ref = 0.0) {
    NeuronParams p;
    p.tau_m = tau_m;
    p.v_th = 1.0;
    p.v_rest = 0.0;
    p.v_reset = 0.0;
    p.t_ref = t_ref;
    return p;
}

// Steps a neuron under constant input and returns the interval between the
// second and third spikes, so the first one from rest is excluded.
double steady_isi(const NeuronParams& p, double current, double dt) {
    NeuronState s{p.v_rest, 0.0};
    std::vector<double> times;
    for (long k = 1; times.size() < 3 && k < 10'000'000; ++k) {
        const auto r = lif_step(s, p, current, dt);
        s = r.state;
        if (r.spiked) times.push_back(static_cast<double>(k) * dt);
    }
    return times.at(2) - times.at(1);
}

} // namespace

TEST(Lif, RestIsFixedPoint) {
    const auto p = unit_params();
    const auto r = lif_step({0.0, 0.0}, p, 0.0, 1.0);
    EXPECT_EQ(r.state.v, 0.0);
    EXPECT_FALSE(r.spiked);
}

TEST(Lif, DecayFactorMatchesExponential) {
    EXPECT_NEAR(membrane_decay(1.0, 10.0), std::exp(-0.1), 1e-12);
    EXPECT_NEAR(membrane_decay(1.0, 10.0), 0.904837418035960, 1e-12);
}

TEST(Lif, UpdateFollowsClosedForm) {
    NeuronParams p = unit_params(7.0);
    p.v_rest = -0.2;
    p.v_reset = -0.3;
    const double beta = std::exp(-0.5 / 7.0);
    const auto r = lif_step({0.4, 0.0}, p, 0.6, 0.5);
    EXPECT_NEAR(r.state.v, beta * (0.4 + 0.2) - 0.2 + (1.0 - beta) * 0.6, 1e-15);
}

TEST(Lif, ConstantInputIsiMatchesAnalyticInterval) {
    const auto p = unit_params(10.0, 0.0);
    const double dt = 0.01;
    const double expected = 10.0 * std::log(2.0 / (2.0 - 1.0));
    EXPECT_NEAR(steady_isi(p, 2.0, dt), expected, dt);
}

TEST(Lif, IsiWithRefractoryPeriodAddsTref) {
    const auto p = unit_params(10.0, 3.0);
    const double dt = 0.01;
    EXPECT_NEAR(steady_isi(p, 2.0, dt), 3.0 + 10.0 * std::log(2.0), 2 * dt);
}

TEST(Lif, RejectsBadArguments) {
    const auto p = unit_params();
    EXPECT_THROW(lif_step({}, p, 0.0, 0.0), InvalidArgument);
    EXPECT_THROW(lif_step({}, p, 0.0, -1.0), InvalidArgument);
    auto bad = p;
    bad.tau_m = 0.0;
    EXPECT_THROW(lif_step({}, bad, 0.0, 1.0), InvalidArgument);
    bad = p;
    bad.v_rest = 1.5;
    EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Lif, HeldAtResetWhileRefractory) {
    const auto p = unit_params(10.0, 2.0);
    NeuronState s{0.0, 0.0};
    auto r = lif_step(s, p, 100.0, 1.0);
    ASSERT_TRUE(r.spiked);
    EXPECT_EQ(r.state.refractory_remaining, 2.0);
    r = lif_step(r.state, p, 100.0, 1.0);
    EXPECT_FALSE(r.spiked);
    EXPECT_EQ(r.state.v, p.v_reset);
    r = lif_step(r.state, p, 100.0, 1.0);
    EXPECT_FALSE(r.spiked);
    r = lif_step(r.state, p, 100.0, 1.0);
    EXPECT_TRUE(r.spiked);
}

TEST(Lif, ExactSchemeAgreesWithFineEuler) {
    const auto p = unit_params(20.0);
    NeuronParams no_spike = p;
    no_spike.v_th = 1e9;
    const double dt = 0.1, current = 0.7;
    NeuronState s{0.0, 0.0};
    for (int k = 0; k < 1000; ++k) s = lif_step(s, no_spike, current, dt).state;
    const double euler = euler_integrate(0.0, no_spike, current, 100.0, dt / 100.0);
    EXPECT_LT(std::abs(s.v - euler) / std::abs(euler), 1e-3);
}

TEST(Lif, MonotoneInInput) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 0.9);
    auto p = unit_params(15.0);
    p.v_th = 1e9;
    for (int k = 0; k < 200; ++k) {
        const double v = u(rng), i1 = u(rng), i2 = i1 + 1e-3 + u(rng);
        EXPECT_LT(lif_step({v, 0.0}, p, i1, 1.0).state.v, lif_step({v, 0.0}, p, i2, 1.0).state.v);
    }
}

TEST(Lif, NoTwoSpikesCloserThanTref) {
    const auto p = unit_params(5.0, 4.0);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    NeuronState s{};
    double last = -1e9;
    const double dt = 0.5;
    for (int k = 0; k < 20000; ++k) {
        const auto r = lif_step(s, p, u(rng), dt);
        s = r.state;
        if (r.spiked) {
            EXPECT_GE(k * dt - last, p.t_ref);
            last = k * dt;
        }
    }
}

TEST(Population, DegenerateGivesConstantTau) {
    PopulationSpec spec;
    spec.tau_m_exc = DistributionSpec::degenerate(20.0);
    spec.tau_m_inh = DistributionSpec::degenerate(20.0);
    const auto pop = sample_neuron_population(spec, 8, 2, 1);
    ASSERT_EQ(pop.size(), 10u);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        EXPECT_EQ(pop[i].tau_m, 20.0);
        EXPECT_EQ(pop[i].is_excitatory, i < 8);
    }
}

TEST(Population, GammaMeanWithinThreeStandardErrors) {
    PopulationSpec spec;
    spec.tau_m_exc = DistributionSpec::gamma(2.89, 0.248);
    const std::size_t n = 100000;
    const auto pop = sample_neuron_population(spec, n, 0, 42);
    double m = 0.0;
    for (const auto& p : pop) m += p.tau_m;
    m /= static_cast<double>(n);
    const double sd = std::sqrt(2.89) * 0.248;
    EXPECT_NEAR(m, 2.89 * 0.248, 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST(Population, UnitScalesEveryDraw) {
    PopulationSpec a, b;
    a.tau_m_exc = b.tau_m_exc = DistributionSpec::gamma(2.0, 0.5);
    b.tau_m_unit = 20.0;
    const auto pa = sample_neuron_population(a, 50, 0, 5);
    const auto pb = sample_neuron_population(b, 50, 0, 5);
    for (std::size_t i = 0; i < 50; ++i) EXPECT_DOUBLE_EQ(pb[i].tau_m, 20.0 * pa[i].tau_m);
}

TEST(Population, SameSeedIsBitIdentical) {
    PopulationSpec spec;
    spec.tau_m_exc = DistributionSpec::gamma(2.89, 0.248);
    spec.tau_m_inh = DistributionSpec::gamma(5.14, 0.313);
    spec.v_th = DistributionSpec::normal(1.0, 0.05);
    EXPECT_EQ(sample_neuron_population(spec, 30, 10, 77), sample_neuron_population(spec, 30, 10, 77));
    EXPECT_NE(sample_neuron_population(spec, 30, 10, 77), sample_neuron_population(spec, 30, 10, 78));
}

TEST(Population, ImpossibleDistributionIsConfigError) {
    PopulationSpec spec;
    spec.tau_m_exc = DistributionSpec::normal(-50.0, 1.0);
    EXPECT_THROW(sample_neuron_population(spec, 3, 0, 1), ConfigError);
}
