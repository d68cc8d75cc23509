#pragma once

#include "hrsnn/raster.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hrsnn {

struct Trajectory {
    std::vector<double> times;
    Eigen::MatrixXd values; // time x components
    std::vector<std::string> labels;

    // Columns whose label starts with `prefix` (e.g. "Y").
    Eigen::MatrixXd columns_with_prefix(const std::string& prefix) const;
};

// Three-tier Lorenz96 system. Tier sizes must be >= 4. Y and Z are flat
// rings of size J*K and I*J*K, so the cyclic neighbours of the last Y of
// block k are the first Ys of block k+1.
struct Lorenz96Config {
    std::size_t k = 8, j = 8, i = 8;
    double forcing = 20.0;
    double b = 10.0, c = 10.0, d = 10.0, e = 10.0, g = 10.0, h = 1.0;
    // Adds the linear -X_k damping of the classic single-tier model.
    bool x_damping = false;
    double dt = 0.001;
    double duration = 10.0;
    double burn_in = 10.0;
    double sample_interval = 0.01; // rounded to a multiple of dt
    double x0 = 1.0, y0 = 0.0, z0 = 0.0;
    double perturbation = 0.1; // sd of the seeded initial perturbation

    std::size_t state_size() const { return k + j * k + i * j * k; }
    void validate() const;
};

void lorenz96_derivative(const Lorenz96Config& cfg, const Eigen::VectorXd& state, Eigen::VectorXd& out);
Eigen::VectorXd lorenz96_initial_state(const Lorenz96Config& cfg, std::uint64_t seed);

// Classic RK4 on [0, duration] after the burn-in. Throws NumericalError
// naming the step on a non-finite state.
Trajectory lorenz96_multiscale(const Lorenz96Config& cfg, std::uint64_t seed);
// Integrates from a given state without burn-in; returns the final state.
Eigen::VectorXd lorenz96_integrate(const Lorenz96Config& cfg, Eigen::VectorXd state, double duration);

struct Lorenz63Config {
    double rho = 28.0, sigma = 10.0, beta = 8.0 / 3.0;
    std::array<double, 3> x0{1.0, 1.0, 1.0};
    double dt = 0.03;
    double duration = 50.0;
    double burn_in = 0.0;
};

std::array<double, 3> lorenz63_derivative(const Lorenz63Config& cfg, const std::array<double, 3>& s);
std::array<double, 3> lorenz63_integrate(const Lorenz63Config& cfg, std::array<double, 3> s, double duration);
Trajectory lorenz63(const Lorenz63Config& cfg);

// n samples of U[-1, 1].
std::vector<double> iid_uniform(std::size_t n, std::uint64_t seed);

struct SpikeClassConfig {
    int n_classes = 5;
    std::size_t samples_per_class = 40;
    std::size_t n_channels = 20;
    double duration = 100.0; // ms
    double dt = 1.0;
    double template_rate = 40.0; // Hz per channel
    double jitter = 2.0;         // sd of Gaussian spike-time jitter, ms
    double deletion = 0.1;
    double test_fraction = 0.3;
};

struct SpikeClassData {
    std::vector<SpikeRaster> templates;
    std::vector<SpikeRaster> train, test;
    std::vector<int> train_labels, test_labels;
};

// Frozen Poisson templates per class; samples are jittered copies with
// random spike deletion, split per class into train and test.
SpikeClassData synthetic_spike_classes(const SpikeClassConfig& cfg, std::uint64_t seed);

// "time,<label>..." rows.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

} // namespace hrsnn
