#pragma once

#include "hrsnn/neuron.hpp"
#include "hrsnn/plasticity.hpp"
#include "hrsnn/raster.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hrsnn {

// Wiring and weight scales of the recurrent E/I network. Block names read
// source-to-target: p_ei is the probability of an E -> I connection.
struct TopologyConfig {
    std::size_t n_exc = 160;
    std::size_t n_inh = 40;

    double p_ee = 0.1, p_ei = 0.1, p_ie = 0.1, p_ii = 0.1;
    // Per-block weight multipliers. Inhibitory sources inject negative current.
    double a_ee = 1.0, a_ei = 1.0, a_ie = 1.0, a_ii = 1.0;

    double w_min = 0.0;
    double w_max = 1.0;

    std::size_t n_inputs = 1;
    double input_fraction = 0.3; // share of neurons that receive input
    double input_prob = 1.0;     // P(channel -> receiving neuron)
    double input_scale = 1.0;
    double input_w_min = 0.0;
    double input_w_max = 1.0;

    double bias_current = 0.0;
    bool plastic_inhibitory = true;

    std::size_t n_neurons() const { return n_exc + n_inh; }
    // Throws ConfigError naming the offending field.
    void validate() const;
};

// Sparse connectivity in CSR form keyed by the postsynaptic neuron. Rows are
// sorted by presynaptic index, which fixes the summation order of currents.
struct Topology {
    std::size_t n_exc = 0;
    std::size_t n_inh = 0;
    std::size_t n_inputs = 0;

    std::vector<std::uint32_t> row_ptr; // n_neurons + 1
    std::vector<std::uint32_t> pre;     // per synapse
    std::vector<std::uint32_t> post;    // per synapse
    std::vector<double> gain;           // signed block multiplier per synapse

    // Synapse ids grouped by presynaptic neuron (for depression updates).
    std::vector<std::uint32_t> out_ptr;
    std::vector<std::uint32_t> out_syn;

    std::vector<std::uint32_t> in_row_ptr; // n_neurons + 1
    std::vector<std::uint32_t> in_channel;
    std::vector<double> in_weight; // already scaled

    std::size_t n_neurons() const { return n_exc + n_inh; }
    std::size_t n_synapses() const { return pre.size(); }
};

struct Network {
    TopologyConfig config;
    std::vector<NeuronParams> neurons;
    std::vector<StdpParams> stdp; // one shared entry or one per synapse
    Topology topology;
    std::vector<double> weights; // weight magnitude per synapse
    std::uint64_t seed = 0;

    const StdpParams& stdp_for(std::size_t syn) const {
        return stdp.size() == 1 ? stdp.front() : stdp[syn];
    }
};

// Erdos-Renyi wiring per block plus the input projection. Deterministic in
// seed. Initial weights are uniform in [w_min, w_max].
struct Wiring {
    Topology topology;
    std::vector<double> initial_weights;
};
Wiring wire_network(const TopologyConfig& cfg, std::uint64_t seed);

// neuron_params must hold n_exc excitatory followed by n_inh inhibitory
// entries; stdp_params holds one shared entry or exactly one per synapse of
// the wiring produced for (cfg, seed).
Network build_network(std::vector<NeuronParams> neuron_params, std::vector<StdpParams> stdp_params,
                      const TopologyConfig& cfg, std::uint64_t seed);

struct SimulationTrace {
    SpikeRaster raster;
    std::vector<double> final_weights;
    std::optional<Eigen::MatrixXd> decoded_states; // bins x decoded neurons
};

enum class Backend { Serial, OpenMP };

struct SimOptions {
    double dt = 1.0;
    bool learning = false;
    Backend backend = Backend::OpenMP;
};

// Runs duration/dt bins. Input to neuron i at bin t is
//   bias + sum_j W_ij s_j(t-1) + sum_k w_in_ik u_k(t),
// i.e. recurrent spikes arrive one bin later, input spikes immediately.
// Input bins past the end of input_spikes are silent.
SimulationTrace simulate(const Network& net, const SpikeRaster& input_spikes, double duration,
                         const SimOptions& opts);

// Straightforward serial implementation on dense matrices. Produces output
// bit-identical to simulate(); kept as the test and benchmark reference.
SimulationTrace simulate_reference(const Network& net, const SpikeRaster& input_spikes,
                                   double duration, const SimOptions& opts);

struct SpikeCount {
    std::size_t total = 0;
    double per_neuron = 0.0; // S / N_R
};
SpikeCount total_spike_count(const SpikeRaster& raster);
inline SpikeCount total_spike_count(const SimulationTrace& trace) {
    return total_spike_count(trace.raster);
}

// Rolling-window spike counts per neuron: mean over windows of `window_bins`.
std::vector<double> windowed_spike_counts(const SpikeRaster& raster, std::size_t window_bins);

// Versioned JSON snapshot of a network. Weights round-trip bit-exactly.
std::string network_to_json(const Network& net, int indent = -1);
Network network_from_json(const std::string& text);
void save_network(const std::string& path, const Network& net);
Network load_network(const std::string& path);

} // namespace hrsnn
