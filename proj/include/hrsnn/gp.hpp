#pragma once

#include <Eigen/Dense>

namespace hrsnn {

// Matern kernel as a function of a precomputed distance. nu must be 0.5,
// 1.5 or 2.5. For nu = 2.5:
//   k(d) = s2 (1 + sqrt5 d / l + 5 d^2 / (3 l^2)) exp(-sqrt5 d / l).
double matern(double d, double length_scale, double variance, double nu = 2.5);
inline double matern52(double d, double length_scale, double variance) {
    return matern(d, length_scale, variance, 2.5);
}

struct KernelConfig {
    double nu = 2.5;
    double length_scale = 1.0;
    double variance = 1.0;
    // Observation noise as a fraction of the kernel variance.
    double noise = 0.0;
    // Pick (length_scale, variance) by maximizing the log marginal
    // likelihood over a log-spaced grid.
    bool fit_hyperparameters = false;
    int grid_size = 20;
};

// GP regression on an arbitrary metric space: callers supply pairwise
// distances instead of coordinates. Constant prior mean = mean of the
// observations.
struct GpSurrogate {
    KernelConfig kernel;
    double prior_mean = 0.0;
    double jitter = 0.0; // relative jitter that made the Gram matrix factorizable
    Eigen::VectorXd values;
    Eigen::MatrixXd chol_l; // lower Cholesky factor of K + (noise + jitter) s2 I
    Eigen::VectorXd alpha;  // (K + ...)^-1 (y - m)
    double log_marginal_likelihood = 0.0;

    Eigen::Index size() const { return values.size(); }
};

struct GpPrediction {
    double mean = 0.0;
    double sd = 0.0;
};

// distances: n x n pairwise distances between observed points.
// Throws NumericalError when the Gram matrix stays indefinite after jitter
// escalation from 1e-10 to 1e-4 (relative to the kernel variance).
GpSurrogate gp_fit(const Eigen::MatrixXd& distances, const Eigen::VectorXd& values, const KernelConfig& cfg);

// distances_to_observed: distances from the query to each observed point.
GpPrediction gp_predict(const GpSurrogate& gp, const Eigen::VectorXd& distances_to_observed);

// Maximization form: (mu - best) Phi(z) + sd phi(z), z = (mu - best) / sd;
// max(mu - best, 0) when sd = 0.
double expected_improvement(double mean, double sd, double best);

double normal_pdf(double z);
double normal_cdf(double z);

} // namespace hrsnn
