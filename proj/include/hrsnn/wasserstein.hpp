#pragma once

#include "hrsnn/distribution.hpp"

#include <vector>

namespace hrsnn {

inline constexpr std::size_t kQuantileNodes = 512;

// Quantile representation of a scalar marginal used for fast repeated
// distance evaluation. Normal and degenerate marginals keep (mean, sd) so
// that Gaussian pairs use the closed form.
struct MarginalSketch {
    bool gaussian = false;
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> quantiles; // midpoint nodes (k + 1/2) / n; empty when gaussian

    static MarginalSketch of(const DistributionSpec& d, std::size_t nodes = kQuantileNodes);
};

// Squared 2-Wasserstein distance between sketches.
double wasserstein2_squared(const MarginalSketch& a, const MarginalSketch& b);

// 2-Wasserstein distance between scalar marginals. Gaussian pairs use
// sqrt((m1 - m2)^2 + (s1 - s2)^2); other pairs integrate the squared
// quantile difference with a midpoint rule. Support truncation is ignored.
double wasserstein2_marginal(const DistributionSpec& d1, const DistributionSpec& d2);

// Midpoint quadrature of int_0^1 (F1^-1(u) - F2^-1(u))^2 du, square-rooted,
// regardless of family.
double wasserstein2_quadrature(const DistributionSpec& d1, const DistributionSpec& d2,
                               std::size_t nodes = kQuantileNodes);

// Entropy-regularized optimal transport between equal-weight quantile atoms
// of the two marginals (log-domain Sinkhorn). Returns the square root of
// the transport cost of the regularized plan. Cross-check only.
double sinkhorn_w2(const DistributionSpec& d1, const DistributionSpec& d2, double epsilon = 0.05,
                   int iterations = 1000, std::size_t atoms = 128);

} // namespace hrsnn
