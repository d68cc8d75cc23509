#pragma once

// Task-level pipelines: encode -> network -> decode -> readout/metric.

#include "hrsnn/bayesopt.hpp"
#include "hrsnn/codec.hpp"
#include "hrsnn/datagen.hpp"
#include "hrsnn/metrics.hpp"
#include "hrsnn/network.hpp"
#include "hrsnn/readout.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hrsnn {

// Independent sub-stream seed for a named component of one run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

enum class Encoding { Rate, StepForward };
std::string to_string(Encoding e);
Encoding encoding_from_string(const std::string& s);

struct ModelConfig {
    TopologyConfig topology;
    PopulationSpec neurons;
    StdpDistributions stdp;
    bool learning = true;          // run an STDP phase before evaluation
    std::size_t warmup_samples = 500;
    CodecConfig codec;
    Encoding encoding = Encoding::Rate;
    std::size_t channels_per_dim = 10; // rate encoding only
    std::size_t hold = 5;              // bins per input sample
    bool decode_excitatory_only = true;
    double dt = 1.0;
    Backend backend = Backend::OpenMP;

    void validate() const;
};

// Samples neurons and STDP parameters and wires the network. n_inputs is
// taken from the argument rather than the topology block.
Network instantiate_network(const ModelConfig& model, std::size_t n_inputs, std::uint64_t seed);

// Channels the encoder produces for `dims` signal dimensions.
std::size_t encoded_channels(const ModelConfig& model, std::size_t dims);

// Encodes rows of `signals` (time x dims, already scaled to [0, 1] for rate
// encoding), holding each sample for model.hold bins.
SpikeRaster encode_signals(const ModelConfig& model, const Eigen::MatrixXd& signals, std::uint64_t seed);

// Runs STDP on `input` and installs the learned weights.
void train_stdp(Network& net, const SpikeRaster& input, const ModelConfig& model);

// Decoded states sampled at the last bin of every held input sample.
Eigen::MatrixXd sample_states(const ModelConfig& model, const Network& net, const SpikeRaster& raster,
                              std::size_t n_samples);

// Delay-line fixture: column i holds input(t - i - 1).
Eigen::MatrixXd delay_line_states(const std::vector<double>& input, std::size_t k);

struct McEvalConfig {
    std::size_t samples = 2000;
    CapacityConfig capacity{100, 1e-6, 0.7, 50, false, 0};
};

struct McEvalResult {
    CapacityReport capacity;
    SpikeCount spikes;
    double efficiency = 0.0; // NaN when the network is silent
    double eigen_heterogeneity = 0.0;
    Network network; // after the STDP phase
};

McEvalResult evaluate_memory_capacity(const ModelConfig& model, const McEvalConfig& cfg, std::uint64_t seed);

enum class System { Lorenz63, Lorenz96 };
std::string to_string(System s);
System system_from_string(const std::string& s);

struct PredictConfig {
    System system = System::Lorenz63;
    Lorenz63Config lorenz63;
    Lorenz96Config lorenz96;
    std::size_t dims = 3;   // leading components used (Y tier for Lorenz96)
    std::size_t horizon = 1;
    double train_fraction = 0.7;
    std::size_t washout = 50;
    double ridge = 1e-4;
};

struct PredictResult {
    double nrmse_train = 0.0;
    double nrmse_test = 0.0;
    Eigen::MatrixXd target;     // test split
    Eigen::MatrixXd prediction; // test split
    SpikeCount spikes;
    Network network;
};

// Prepares the trajectory for `cfg` (time x dims).
Eigen::MatrixXd prediction_signal(const PredictConfig& cfg, std::uint64_t seed);
PredictResult evaluate_prediction(const ModelConfig& model, const PredictConfig& cfg, std::uint64_t seed);

enum class ReadoutKind { Ridge, Adam };
std::string to_string(ReadoutKind k);
ReadoutKind readout_from_string(const std::string& s);

struct ClassifyConfig {
    SpikeClassConfig data;
    std::size_t feature_slices = 4; // decoded states averaged over this many time slices
    ReadoutKind readout = ReadoutKind::Ridge;
    double ridge = 1e-2;
    AdamConfig adam{1e-2, 0.9, 0.999, 1e-8, 500, 0};
    std::size_t warmup_samples = 20; // training samples replayed for STDP
    bool permute_labels = false;
};

struct ClassifyResult {
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    std::vector<int> test_labels;
    std::vector<int> test_predictions;
    SpikeCount spikes; // over the test samples
    Network network;
};

ClassifyResult evaluate_classification(const ModelConfig& model, const ClassifyConfig& cfg, std::uint64_t seed);

enum class BoObjective { Capacity, Spikes, Efficiency };
std::string to_string(BoObjective o);
BoObjective objective_from_string(const std::string& s);

// Installs the marginals of a search point into a copy of the model.
ModelConfig apply_search_point(const ModelConfig& model, const SearchPoint& p);

struct ObjectiveValues {
    double capacity = 0.0;
    double mean_spikes = 0.0;
    double efficiency = 0.0; // NaN when silent
};

ObjectiveValues evaluate_point(const ModelConfig& model, const McEvalConfig& mc, const SearchPoint& p,
                               std::uint64_t seed);
// 1/C, S~ or 1/E; NaN for undefined values so the optimizer records a failure.
double objective_value(BoObjective o, const ObjectiveValues& v);

} // namespace hrsnn
