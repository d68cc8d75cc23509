#pragma once

#include "hrsnn/raster.hpp"

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hrsnn {

struct CodecConfig {
    double sf_threshold = 0.1;
    double rate_max = 200.0; // Hz
    std::size_t window = 50; // decoder window tau, in bins
    double window_leak = 0.02; // gamma^(window - 1)

    // Discount gamma solved from gamma^(window - 1) = window_leak.
    double gamma() const;
    void validate() const;
};

double leak_to_gamma(double window_leak, std::size_t window);

// Step-forward encoding of one signal into an up channel (neuron 0) and a
// down channel (neuron 1). Baseline starts at signal[0] and moves by one
// threshold per emitted spike.
SpikeRaster sf_encode(std::span<const double> signal, double threshold, double dt = 1.0);

// Multi-dimensional variant: column d of `signals` (time x dims) maps to
// channels 2d (up) and 2d+1 (down).
SpikeRaster sf_encode(const Eigen::MatrixXd& signals, double threshold, double dt = 1.0);

// Reconstructs the tracked baseline B0 + threshold * (cum. up - cum. down).
std::vector<double> sf_reconstruct(const SpikeRaster& sf, double baseline0, double threshold);

// Bernoulli rate code: each of n_channels fires in bin t with probability
// signal[t] * rate_max * dt (rate in Hz, dt in ms), clamped to [0, 1].
// signal must lie in [0, 1].
SpikeRaster rate_encode(std::span<const double> signal, double rate_max, std::size_t n_channels, double dt,
                        std::uint64_t seed);

// Exponentially weighted spike count over the last `window` bins:
//   x_i(t) = sum_{n=0..window} gamma^n s_i(t - n),
// with bins before t = 0 silent. Returns bins x neurons.
Eigen::MatrixXd rate_decode(const SpikeRaster& raster, std::size_t window, double gamma);

} // namespace hrsnn
