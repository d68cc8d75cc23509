#include "hrsnn/error.hpp"
#include "hrsnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <omp.h>

namespace hrsnn {

namespace {

constexpr double kNever = -std::numeric_limits<double>::infinity();

std::size_t bins_for(double duration, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
    if (!(duration >= 0.0)) throw InvalidArgument("duration must be >= 0");
    return static_cast<std::size_t>(std::llround(duration / dt));
}

void check_input(const Network& net, const SpikeRaster& input, double dt) {
    if (input.n_bins() > 0 && std::abs(input.dt() - dt) > 1e-12 * dt)
        throw InvalidArgument("input raster bin width " + std::to_string(input.dt()) +
                              " ms does not match simulation dt " + std::to_string(dt) + " ms");
    if (input.n_bins() > 0 && input.n_neurons() != net.topology.n_inputs)
        throw InvalidArgument("input raster has " + std::to_string(input.n_neurons()) + " channels, network expects " +
                              std::to_string(net.topology.n_inputs));
}

bool plastic(const Network& net, std::size_t pre) {
    return net.config.plastic_inhibitory || pre < net.topology.n_exc;
}

} // namespace

SimulationTrace simulate(const Network& net, const SpikeRaster& input, double duration, const SimOptions& opts) {
    const double dt = opts.dt;
    const std::size_t n_bins = bins_for(duration, dt);
    check_input(net, input, dt);

    const Topology& topo = net.topology;
    const auto n = static_cast<long>(topo.n_neurons());
    const bool parallel = opts.backend == Backend::OpenMP;

    std::vector<double> beta(n);
    for (long i = 0; i < n; ++i) beta[i] = membrane_decay(dt, net.neurons[i].tau_m);

    std::vector<NeuronState> state(n);
    for (long i = 0; i < n; ++i) state[i].v = net.neurons[i].v_rest;
    std::vector<double> weights = net.weights;
    std::vector<double> current(n, 0.0);
    std::vector<std::uint8_t> prev(n, 0);
    std::vector<double> last_spike(n, kNever);

    SimulationTrace trace;
    trace.raster = SpikeRaster(topo.n_neurons(), n_bins, dt);

    for (std::size_t bin = 0; bin < n_bins; ++bin) {
        const bool has_input = bin < input.n_bins();
        const std::uint8_t* u = has_input ? input.bin_row(bin).data() : nullptr;
        auto row = trace.raster.bin_row(bin);
        long bad = -1;

#pragma omp parallel for if (parallel) schedule(static)
        for (long i = 0; i < n; ++i) {
            double c = net.config.bias_current;
            for (auto s = topo.row_ptr[i]; s < topo.row_ptr[i + 1]; ++s)
                if (prev[topo.pre[s]]) c += topo.gain[s] * weights[s];
            if (u)
                for (auto k = topo.in_row_ptr[i]; k < topo.in_row_ptr[i + 1]; ++k)
                    if (u[topo.in_channel[k]]) c += topo.in_weight[k];
            current[i] = c;
            if (!std::isfinite(c)) {
#pragma omp atomic write
                bad = i;
                continue;
            }
            const auto r = lif_step_unchecked(state[i], net.neurons[i], beta[i], c, dt);
            state[i] = r.state;
            row[i] = r.spiked ? 1 : 0;
        }
        if (bad >= 0)
            throw NumericalError("non-finite input current to neuron " + std::to_string(bad) + " at bin " +
                                 std::to_string(bin));

        if (opts.learning) {
            const double t = static_cast<double>(bin) * dt;
            // potentiation: each post spike pairs with the latest pre spike (same bin included)
#pragma omp parallel for if (parallel) schedule(dynamic, 16)
            for (long i = 0; i < n; ++i) {
                if (!row[i]) continue;
                for (auto s = topo.row_ptr[i]; s < topo.row_ptr[i + 1]; ++s) {
                    const auto j = topo.pre[s];
                    if (!plastic(net, j)) continue;
                    const double t_pre = row[j] ? t : last_spike[j];
                    if (t_pre == kNever) continue;
                    const StdpParams& p = net.stdp_for(s);
                    const double dw = p.eta_plus * (p.w_max - weights[s]) * std::exp(-(t - t_pre) / p.tau_plus);
                    weights[s] = std::clamp(weights[s] + dw, p.w_min, p.w_max);
                }
            }
            // depression: each pre spike pairs with the latest strictly earlier post spike
#pragma omp parallel for if (parallel) schedule(dynamic, 16)
            for (long j = 0; j < n; ++j) {
                if (!row[j] || !plastic(net, j)) continue;
                for (auto k = topo.out_ptr[j]; k < topo.out_ptr[j + 1]; ++k) {
                    const auto s = topo.out_syn[k];
                    const auto i = topo.post[s];
                    const double t_post = last_spike[i];
                    if (t_post == kNever) continue;
                    const StdpParams& p = net.stdp_for(s);
                    const double dw = -p.eta_minus * (weights[s] - p.w_min) * std::exp(-(t - t_post) / p.tau_minus);
                    weights[s] = std::clamp(weights[s] + dw, p.w_min, p.w_max);
                }
            }
            for (long i = 0; i < n; ++i)
                if (row[i]) last_spike[i] = t;
        }
        std::copy(row.begin(), row.end(), prev.begin());
    }
    trace.final_weights = std::move(weights);
    return trace;
}

SimulationTrace simulate_reference(const Network& net, const SpikeRaster& input, double duration,
                                   const SimOptions& opts) {
    const double dt = opts.dt;
    const std::size_t n_bins = bins_for(duration, dt);
    check_input(net, input, dt);

    const Topology& topo = net.topology;
    const std::size_t n = topo.n_neurons();
    const std::size_t m = topo.n_inputs;

    // dense gain, weight and synapse-id matrices, indexed [post][pre]
    std::vector<std::vector<double>> gain(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<long>> sid(n, std::vector<long>(n, -1));
    for (std::size_t i = 0; i < n; ++i)
        for (auto s = topo.row_ptr[i]; s < topo.row_ptr[i + 1]; ++s) {
            gain[i][topo.pre[s]] = topo.gain[s];
            w[i][topo.pre[s]] = net.weights[s];
            sid[i][topo.pre[s]] = s;
        }
    std::vector<std::vector<double>> win(n, std::vector<double>(m, 0.0));
    std::vector<std::vector<bool>> has_in(n, std::vector<bool>(m, false));
    for (std::size_t i = 0; i < n; ++i)
        for (auto k = topo.in_row_ptr[i]; k < topo.in_row_ptr[i + 1]; ++k) {
            win[i][topo.in_channel[k]] = topo.in_weight[k];
            has_in[i][topo.in_channel[k]] = true;
        }

    std::vector<NeuronState> state(n);
    for (std::size_t i = 0; i < n; ++i) state[i].v = net.neurons[i].v_rest;
    std::vector<std::uint8_t> prev(n, 0), now(n, 0);
    std::vector<double> last_spike(n, kNever);

    SimulationTrace trace;
    trace.raster = SpikeRaster(n, n_bins, dt);

    for (std::size_t bin = 0; bin < n_bins; ++bin) {
        for (std::size_t i = 0; i < n; ++i) {
            double c = net.config.bias_current;
            for (std::size_t j = 0; j < n; ++j)
                if (sid[i][j] >= 0 && prev[j]) c += gain[i][j] * w[i][j];
            if (bin < input.n_bins())
                for (std::size_t k = 0; k < m; ++k)
                    if (has_in[i][k] && input.get(k, bin)) c += win[i][k];
            if (!std::isfinite(c))
                throw NumericalError("non-finite input current to neuron " + std::to_string(i) + " at bin " +
                                     std::to_string(bin));
            const auto r = lif_step(state[i], net.neurons[i], c, dt);
            state[i] = r.state;
            now[i] = r.spiked;
            trace.raster.set(i, bin, r.spiked);
        }
        if (opts.learning) {
            const double t = static_cast<double>(bin) * dt;
            for (std::size_t i = 0; i < n; ++i) {
                if (!now[i]) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    if (sid[i][j] < 0 || !plastic(net, j)) continue;
                    const double t_pre = now[j] ? t : last_spike[j];
                    if (t_pre == kNever) continue;
                    w[i][j] = apply_stdp(net.stdp_for(sid[i][j]), w[i][j], t - t_pre);
                }
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (!now[j] || !plastic(net, j)) continue;
                for (std::size_t i = 0; i < n; ++i) {
                    if (sid[i][j] < 0 || last_spike[i] == kNever) continue;
                    w[i][j] = apply_stdp(net.stdp_for(sid[i][j]), w[i][j], last_spike[i] - t);
                }
            }
            for (std::size_t i = 0; i < n; ++i)
                if (now[i]) last_spike[i] = t;
        }
        prev = now;
    }

    trace.final_weights.resize(topo.n_synapses());
    for (std::size_t i = 0; i < n; ++i)
        for (auto s = topo.row_ptr[i]; s < topo.row_ptr[i + 1]; ++s) trace.final_weights[s] = w[i][topo.pre[s]];
    return trace;
}

} // namespace hrsnn
