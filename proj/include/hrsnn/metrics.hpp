#pragma once

#include "hrsnn/error.hpp"
#include "hrsnn/raster.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hrsnn {

// Raised when spike efficiency is requested for a silent network.
class EfficiencyUndefined : public DataError {
public:
    using DataError::DataError;
};

struct CapacityReport {
    std::vector<double> per_delay; // C(tau) for tau = 1..tau_max
    double total = 0.0;
    std::size_t tau_max = 0;
};

struct CapacityConfig {
    std::size_t tau_max = 100;
    double ridge = 1e-6;
    double train_fraction = 0.7;
    std::size_t washout = 0; // leading samples dropped before alignment
    // Contiguous split unless shuffle is set (then permuted with seed).
    bool shuffle = false;
    std::uint64_t seed = 0;
};

// Memory capacity of a state sequence driven by `input`: for every delay a
// ridge readout maps states(t) to input(t - tau) on the training split, and
// C(tau) is the squared correlation of prediction and target on the test
// split, clamped to [0, 1]. Zero-variance predictions score 0.
CapacityReport memory_capacity(const Eigen::MatrixXd& states, std::span<const double> input,
                               const CapacityConfig& cfg = {});

struct EfficiencyReport {
    double capacity = 0.0;
    double mean_spikes = 0.0; // per neuron
    double efficiency = 0.0;
};

// E = C / S~ with S~ the raster's spikes per neuron. Throws EfficiencyUndefined
// when the raster is silent.
EfficiencyReport spike_efficiency(const CapacityReport& report, const SpikeRaster& raster);
EfficiencyReport spike_efficiency(double capacity, double mean_spikes);

struct HeterogeneityReport {
    double log_det = 0.0;
    bool degenerate = false; // every dimension has zero variance
};

// log det(Cov + eps I) of the parameter ensemble (rows are samples).
HeterogeneityReport heterogeneity_entropy(const Eigen::MatrixXd& params, double eps = 1e-9);

// J = sum(lambda^2) / (sum lambda)^2 over the covariance eigenvalues.
double eigen_heterogeneity(const Eigen::MatrixXd& cov);

// Unbiased covariance of the columns (rows are time samples).
Eigen::MatrixXd state_covariance(const Eigen::MatrixXd& states);

// Per-neuron firing rate in Hz, averaged over consecutive windows of
// window_bins bins (trailing partial window ignored).
std::vector<double> avg_firing_rate(const SpikeRaster& raster, std::size_t window_bins);

// Squared Pearson correlation; 0 when either side has zero variance.
double squared_correlation(std::span<const double> a, std::span<const double> b);

// RMSE divided by the standard deviation of the target.
double nrmse(const Eigen::MatrixXd& prediction, const Eigen::MatrixXd& target);

// CSV with header "tau,c_tau", one row per delay and a final "total" row.
void write_capacity_csv(std::ostream& os, const CapacityReport& report);

} // namespace hrsnn
