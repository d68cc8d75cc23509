#pragma once

#include "hrsnn/distribution.hpp"

#include <cstdint>
#include <vector>

namespace hrsnn {

// Pair-based STDP constants for one synapse. Times in ms.
struct StdpParams {
    double tau_plus = 18.235;
    double tau_minus = 22.382;
    double eta_plus = 0.516;
    double eta_minus = 0.448;
    double w_min = 0.0;
    double w_max = 1.0;

    void validate() const;

    bool operator==(const StdpParams&) const = default;
};

// Weight change for a spike pair separated by delta_t = t_post - t_pre:
//   eta+ (w_max - w) exp(-|dt| / tau+)   for dt >= 0
//  -eta- (w - w_min) exp(-|dt| / tau-)   for dt <  0
// Throws InvalidArgument if w is outside [w_min, w_max].
double stdp_delta(const StdpParams& p, double w, double delta_t);

// Applies the update and clamps into [w_min, w_max].
double apply_stdp(const StdpParams& p, double w, double delta_t);

struct StdpDistributions {
    DistributionSpec tau_plus = DistributionSpec::normal(18.235, 1.522);
    DistributionSpec tau_minus = DistributionSpec::normal(22.382, 1.768);
    DistributionSpec eta_plus = DistributionSpec::normal(0.516, 0.0055);
    DistributionSpec eta_minus = DistributionSpec::normal(0.448, 0.0057);

    // Same means, zero spread.
    StdpDistributions homogeneous() const;
};

// Samples n_synapses parameter sets. Time constants are truncated to
// positive values and learning rates to non-negative values.
std::vector<StdpParams> sample_stdp_population(const StdpDistributions& dists, double w_min,
                                               double w_max, std::size_t n_synapses,
                                               std::uint64_t seed);

} // namespace hrsnn
