#include "hrsnn/codec.hpp"

#include "hrsnn/distribution.hpp"
#include "hrsnn/error.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace hrsnn {

double leak_to_gamma(double window_leak, std::size_t window) {
    if (!(window_leak > 0.0 && window_leak < 1.0)) throw ConfigError("window leak must lie in (0, 1)");
    if (window < 2) throw ConfigError("decoder window must be at least 2 bins");
    return std::pow(window_leak, 1.0 / static_cast<double>(window - 1));
}

double CodecConfig::gamma() const { return leak_to_gamma(window_leak, window); }

void CodecConfig::validate() const {
    if (!(sf_threshold > 0.0)) throw ConfigError("sf_threshold must be > 0");
    if (!(rate_max >= 0.0)) throw ConfigError("rate_max must be >= 0");
    (void)gamma();
}

SpikeRaster sf_encode(std::span<const double> signal, double threshold, double dt) {
    if (!(threshold > 0.0)) throw InvalidArgument("step-forward threshold must be > 0");
    SpikeRaster out(2, signal.size(), dt);
    if (signal.empty()) return out;
    double baseline = signal[0];
    for (std::size_t t = 0; t < signal.size(); ++t) {
        if (signal[t] > baseline + threshold) {
            out.set(0, t);
            baseline += threshold;
        } else if (signal[t] < baseline - threshold) {
            out.set(1, t);
            baseline -= threshold;
        }
    }
    return out;
}

SpikeRaster sf_encode(const Eigen::MatrixXd& signals, double threshold, double dt) {
    const auto n_t = static_cast<std::size_t>(signals.rows());
    const auto dims = static_cast<std::size_t>(signals.cols());
    SpikeRaster out(2 * dims, n_t, dt);
    std::vector<double> col(n_t);
    for (std::size_t d = 0; d < dims; ++d) {
        for (std::size_t t = 0; t < n_t; ++t) col[t] = signals(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d));
        const SpikeRaster one = sf_encode(col, threshold, dt);
        for (std::size_t t = 0; t < n_t; ++t) {
            out.set(2 * d, t, one.get(0, t));
            out.set(2 * d + 1, t, one.get(1, t));
        }
    }
    return out;
}

std::vector<double> sf_reconstruct(const SpikeRaster& sf, double baseline0, double threshold) {
    std::vector<double> out(sf.n_bins());
    long net = 0;
    for (std::size_t t = 0; t < sf.n_bins(); ++t) {
        net += static_cast<long>(sf.get(0, t)) - static_cast<long>(sf.get(1, t));
        out[t] = baseline0 + threshold * static_cast<double>(net);
    }
    return out;
}

SpikeRaster rate_encode(std::span<const double> signal, double rate_max, std::size_t n_channels, double dt,
                        std::uint64_t seed) {
    if (!(rate_max >= 0.0)) throw InvalidArgument("rate_max must be >= 0");
    const double p_max = rate_max * dt * 1e-3;
    if (p_max > 1.0)
        std::clog << "warning: rate_max * dt = " << p_max << " exceeds one spike per bin; probabilities clamped\n";
    Rng rng(seed);
    SpikeRaster out(n_channels, signal.size(), dt);
    for (std::size_t t = 0; t < signal.size(); ++t) {
        if (!(signal[t] >= 0.0 && signal[t] <= 1.0))
            throw InvalidArgument("rate_encode expects a signal in [0, 1]; bin " + std::to_string(t) + " holds " +
                                  std::to_string(signal[t]));
        const double p = std::clamp(signal[t] * p_max, 0.0, 1.0);
        auto row = out.bin_row(t);
        for (std::size_t c = 0; c < n_channels; ++c) row[c] = uniform01(rng) < p ? 1 : 0;
    }
    return out;
}

Eigen::MatrixXd rate_decode(const SpikeRaster& raster, std::size_t window, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("decoder gamma must lie in (0, 1)");
    const auto n_t = static_cast<long>(raster.n_bins());
    const auto n = static_cast<long>(raster.n_neurons());
    std::vector<double> powers(window + 1);
    powers[0] = 1.0;
    for (std::size_t k = 1; k <= window; ++k) powers[k] = powers[k - 1] * gamma;

    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n_t, n);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        for (long t = 0; t < n_t; ++t) {
            if (!raster.get(static_cast<std::size_t>(i), static_cast<std::size_t>(t))) continue;
            // scatter this spike forward over the window
            const long last = std::min<long>(n_t - 1, t + static_cast<long>(window));
            for (long u = t; u <= last; ++u) x(u, i) += powers[static_cast<std::size_t>(u - t)];
        }
    }
    return x;
}

} // namespace hrsnn
