#include "hrsnn/error.hpp"
#include "hrsnn/pipeline.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hrsnn;

namespace {

ModelConfig small_model() {
    ModelConfig m;
    m.topology.n_exc = 48;
    m.topology.n_inh = 12;
    m.topology.input_scale = 0.5;
    m.channels_per_dim = 20;
    m.codec.rate_max = 500;
    m.neurons.base.t_ref = 5;
    m.neurons.tau_m_unit = 20;
    m.neurons.tau_m_exc = DistributionSpec::gamma(2.89, 0.248);
    m.neurons.tau_m_inh = DistributionSpec::gamma(5.14, 0.313);
    m.warmup_samples = 50;
    return m;
}

} // namespace

TEST(Seeds, DerivedStreamsDiffer) {
    EXPECT_NE(derive_seed(1, 1), derive_seed(1, 2));
    EXPECT_NE(derive_seed(1, 1), derive_seed(2, 1));
    EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(DelayLine, ColumnsAreShiftedInputs) {
    const std::vector<double> u{1, 2, 3, 4, 5};
    const auto s = delay_line_states(u, 2);
    EXPECT_EQ(s(3, 0), 3.0);
    EXPECT_EQ(s(3, 1), 2.0);
    EXPECT_EQ(s(0, 0), 0.0);
}

TEST(Pipeline, SharedStdpEntryWhenDegenerate) {
    auto m = small_model();
    m.stdp = m.stdp.homogeneous();
    EXPECT_EQ(instantiate_network(m, 20, 1).stdp.size(), 1u);
    m.stdp = StdpDistributions{};
    const auto net = instantiate_network(m, 20, 1);
    EXPECT_EQ(net.stdp.size(), net.topology.n_synapses());
}

TEST(Pipeline, MemoryCapacityIsDeterministicAndPositive) {
    const auto m = small_model();
    McEvalConfig cfg;
    cfg.samples = 600;
    cfg.capacity.tau_max = 30;
    const auto a = evaluate_memory_capacity(m, cfg, 3);
    const auto b = evaluate_memory_capacity(m, cfg, 3);
    EXPECT_EQ(a.capacity.per_delay, b.capacity.per_delay);
    EXPECT_GT(a.capacity.total, 0.1);
    EXPECT_GT(a.spikes.total, 0u);
    EXPECT_NEAR(a.efficiency, a.capacity.total / a.spikes.per_neuron, 1e-12);
}

TEST(Pipeline, SilentNetworkHasUndefinedEfficiency) {
    auto m = small_model();
    m.topology.input_scale = 0.0;
    McEvalConfig cfg;
    cfg.samples = 300;
    cfg.capacity.tau_max = 10;
    const auto r = evaluate_memory_capacity(m, cfg, 1);
    EXPECT_EQ(r.spikes.total, 0u);
    EXPECT_TRUE(std::isnan(r.efficiency));
    EXPECT_TRUE(std::isnan(objective_value(BoObjective::Efficiency, {r.capacity.total, 0.0, r.efficiency})));
}

TEST(Pipeline, ObjectivesAreMinimisationForms) {
    const ObjectiveValues v{4.0, 20.0, 0.2};
    EXPECT_DOUBLE_EQ(objective_value(BoObjective::Capacity, v), 0.25);
    EXPECT_DOUBLE_EQ(objective_value(BoObjective::Spikes, v), 20.0);
    EXPECT_DOUBLE_EQ(objective_value(BoObjective::Efficiency, v), 5.0);
}

TEST(Pipeline, SearchPointInstallsMarginals) {
    const auto space = default_hrsnn_space();
    const auto p = space.decode(std::vector<double>(space.dims(), 0.25));
    const auto m = apply_search_point(small_model(), p);
    EXPECT_EQ(m.stdp.tau_plus, p.get("tau_plus"));
    EXPECT_EQ(m.neurons.tau_m_inh, p.get("tau_m_inh"));
}

TEST(Pipeline, PredictionRunsOnLorenz63) {
    auto m = small_model();
    PredictConfig cfg;
    cfg.lorenz63.duration = 30.0;
    const auto r = evaluate_prediction(m, cfg, 2);
    EXPECT_EQ(r.target.cols(), 3);
    EXPECT_EQ(r.target.rows(), r.prediction.rows());
    EXPECT_LT(r.nrmse_test, 1.0);
}

TEST(Pipeline, ClassificationBeatsChance) {
    auto m = small_model();
    m.topology.input_scale = 2.0;
    ClassifyConfig cfg;
    cfg.data.samples_per_class = 20;
    const auto r = evaluate_classification(m, cfg, 1);
    EXPECT_GT(r.test_accuracy, 0.6);
    EXPECT_EQ(r.test_labels.size(), r.test_predictions.size());
}

TEST(Pipeline, EncodingNamesRoundTrip) {
    EXPECT_EQ(encoding_from_string(to_string(Encoding::StepForward)), Encoding::StepForward);
    EXPECT_EQ(system_from_string(to_string(System::Lorenz96)), System::Lorenz96);
    EXPECT_EQ(objective_from_string("spikes"), BoObjective::Spikes);
    EXPECT_THROW(objective_from_string("speed"), ConfigError);
}
