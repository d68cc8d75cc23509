#include "hrsnn/network.hpp"

#include "hrsnn/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hrsnn {

namespace {

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
}

void check_nonnegative(double x, const char* name) {
    if (!(x >= 0.0) || !std::isfinite(x))
        throw ConfigError(std::string(name) + " must be finite and >= 0");
}

} // namespace

void TopologyConfig::validate() const {
    check_probability(p_ee, "p_ee");
    check_probability(p_ei, "p_ei");
    check_probability(p_ie, "p_ie");
    check_probability(p_ii, "p_ii");
    check_probability(input_fraction, "input_fraction");
    check_probability(input_prob, "input_prob");
    check_nonnegative(a_ee, "a_ee");
    check_nonnegative(a_ei, "a_ei");
    check_nonnegative(a_ie, "a_ie");
    check_nonnegative(a_ii, "a_ii");
    check_nonnegative(input_scale, "input_scale");
    if (!(w_min < w_max)) throw ConfigError("w_min must be < w_max");
    if (!(w_min >= 0.0)) throw ConfigError("w_min must be >= 0 (weights are magnitudes)");
    if (!(input_w_min <= input_w_max)) throw ConfigError("input_w_min must be <= input_w_max");
    if (!std::isfinite(bias_current)) throw ConfigError("bias_current must be finite");
    if (n_neurons() == 0) throw ConfigError("network needs at least one neuron");
}

Wiring wire_network(const TopologyConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const std::size_t n = cfg.n_neurons();
    Rng rng(seed);

    Wiring out;
    Topology& t = out.topology;
    t.n_exc = cfg.n_exc;
    t.n_inh = cfg.n_inh;
    t.n_inputs = cfg.n_inputs;
    t.row_ptr.assign(n + 1, 0);

    const auto is_exc = [&](std::size_t i) { return i < cfg.n_exc; };
    for (std::size_t post = 0; post < n; ++post) {
        for (std::size_t pre = 0; pre < n; ++pre) {
            // one draw per candidate pair keeps the stream independent of p
            const double u = uniform01(rng);
            if (pre == post) continue;
            double p = 0.0, gain = 0.0;
            if (is_exc(pre)) {
                p = is_exc(post) ? cfg.p_ee : cfg.p_ei;
                gain = is_exc(post) ? cfg.a_ee : cfg.a_ei;
            } else {
                p = is_exc(post) ? cfg.p_ie : cfg.p_ii;
                gain = -(is_exc(post) ? cfg.a_ie : cfg.a_ii);
            }
            if (u < p) {
                t.pre.push_back(static_cast<std::uint32_t>(pre));
                t.post.push_back(static_cast<std::uint32_t>(post));
                t.gain.push_back(gain);
                out.initial_weights.push_back(cfg.w_min + (cfg.w_max - cfg.w_min) * uniform01(rng));
            }
        }
        t.row_ptr[post + 1] = static_cast<std::uint32_t>(t.pre.size());
    }

    // outgoing index
    t.out_ptr.assign(n + 1, 0);
    for (auto p : t.pre) ++t.out_ptr[p + 1];
    std::partial_sum(t.out_ptr.begin(), t.out_ptr.end(), t.out_ptr.begin());
    t.out_syn.resize(t.pre.size());
    std::vector<std::uint32_t> fill(t.out_ptr.begin(), t.out_ptr.end() - 1);
    for (std::size_t s = 0; s < t.pre.size(); ++s) t.out_syn[fill[t.pre[s]]++] = static_cast<std::uint32_t>(s);

    // input projection onto a random subset of neurons
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
        std::swap(order[i - 1], order[std::min(j, i - 1)]);
    }
    const auto n_recv = static_cast<std::size_t>(std::llround(cfg.input_fraction * static_cast<double>(n)));
    std::vector<bool> receives(n, false);
    for (std::size_t k = 0; k < n_recv; ++k) receives[order[k]] = true;

    t.in_row_ptr.assign(n + 1, 0);
    for (std::size_t post = 0; post < n; ++post) {
        if (receives[post]) {
            for (std::size_t ch = 0; ch < cfg.n_inputs; ++ch) {
                const double u = uniform01(rng);
                const double w = cfg.input_w_min + (cfg.input_w_max - cfg.input_w_min) * uniform01(rng);
                if (u < cfg.input_prob) {
                    t.in_channel.push_back(static_cast<std::uint32_t>(ch));
                    t.in_weight.push_back(cfg.input_scale * w);
                }
            }
        }
        t.in_row_ptr[post + 1] = static_cast<std::uint32_t>(t.in_channel.size());
    }
    return out;
}

Network build_network(std::vector<NeuronParams> neuron_params, std::vector<StdpParams> stdp_params,
                      const TopologyConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (neuron_params.size() != cfg.n_neurons())
        throw InvalidArgument("expected " + std::to_string(cfg.n_neurons()) + " neuron parameter sets, got " +
                              std::to_string(neuron_params.size()));
    for (std::size_t i = 0; i < neuron_params.size(); ++i) {
        neuron_params[i].validate();
        if (neuron_params[i].is_excitatory != (i < cfg.n_exc))
            throw InvalidArgument("neuron " + std::to_string(i) + " has the wrong E/I type for its position");
    }
    Wiring w = wire_network(cfg, seed);
    if (stdp_params.empty() || (stdp_params.size() != 1 && stdp_params.size() != w.topology.n_synapses()))
        throw InvalidArgument("expected 1 or " + std::to_string(w.topology.n_synapses()) +
                              " STDP parameter sets, got " + std::to_string(stdp_params.size()));
    for (const auto& s : stdp_params) {
        s.validate();
        if (s.w_min != cfg.w_min || s.w_max != cfg.w_max)
            throw InvalidArgument("STDP weight bounds differ from the topology weight bounds");
    }

    Network net;
    net.config = cfg;
    net.neurons = std::move(neuron_params);
    net.stdp = std::move(stdp_params);
    net.topology = std::move(w.topology);
    net.weights = std::move(w.initial_weights);
    net.seed = seed;
    return net;
}

SpikeCount total_spike_count(const SpikeRaster& raster) {
    SpikeCount c;
    c.total = raster.total_spikes();
    c.per_neuron = raster.n_neurons() == 0 ? 0.0
                                           : static_cast<double>(c.total) / static_cast<double>(raster.n_neurons());
    return c;
}

std::vector<double> windowed_spike_counts(const SpikeRaster& raster, std::size_t window_bins) {
    if (window_bins == 0) throw InvalidArgument("window must be at least one bin");
    std::vector<double> out(raster.n_neurons(), 0.0);
    const std::size_t n_windows = raster.n_bins() / window_bins;
    if (n_windows == 0) return out;
    for (std::size_t b = 0; b < n_windows * window_bins; ++b) {
        const auto row = raster.bin_row(b);
        for (std::size_t i = 0; i < row.size(); ++i) out[i] += row[i];
    }
    for (auto& x : out) x /= static_cast<double>(n_windows);
    return out;
}

} // namespace hrsnn
