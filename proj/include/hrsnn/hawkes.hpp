#pragma once

#include "hrsnn/distribution.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

namespace hrsnn {

// Exponential memory kernel h(t) = amplitude * rate * exp(-rate t); its
// integral is the amplitude.
struct ExpKernel {
    double amplitude = 0.0;
    double rate = 1.0;
};

// Two-population interacting Hawkes process. Population A (excitatory,
// alpha * N units) and B (inhibitory, the rest) share the intensities
//   lambda_A = (mu_A + x1) * exp(-x2)
//   lambda_B = (mu_B + x3) + min(x4, feedback_cap)
// where x1 = (1/N) sum_{j in A} int h1_j dZ^j (A -> A), x2 the same over B
// with h2 (B -> A), x3 over B with h3 (B -> B), x4 over A with h4 (A -> B).
// Kernel vectors hold one shared entry or one entry per source unit.
struct HawkesConfig {
    std::size_t n_total = 100;
    double alpha = 0.8;
    double mu_a = 1.0;
    double mu_b = 1.0;
    std::vector<ExpKernel> h1{{0.0, 1.0}};
    std::vector<ExpKernel> h2{{0.0, 1.0}};
    std::vector<ExpKernel> h3{{0.0, 1.0}};
    std::vector<ExpKernel> h4{{0.0, 1.0}};
    double feedback_cap = std::numeric_limits<double>::infinity();
    // Runaway guards.
    double max_intensity = 1e7;
    std::size_t max_events = 50'000'000;

    std::size_t n_a() const;
    std::size_t n_b() const { return n_total - n_a(); }
    void validate() const;
    // Offspring per event through the self-exciting loops, alpha * mean(a1)
    // and (1 - alpha) * mean(a3); the larger of the two.
    double branching_ratio() const;
};

// Kernel amplitude/rate distributions per connection type; sampled per
// source unit to build a heterogeneous HawkesConfig.
struct KernelDistribution {
    DistributionSpec amplitude = DistributionSpec::degenerate(0.0);
    DistributionSpec rate = DistributionSpec::degenerate(1.0);
};

struct HawkesSpec {
    std::size_t n_total = 100;
    double alpha = 0.8;
    double mu_a = 1.0;
    double mu_b = 1.0;
    KernelDistribution h1, h2, h3, h4;
    double feedback_cap = std::numeric_limits<double>::infinity();

    HawkesConfig sample(std::uint64_t seed) const;
};

struct EventRecord {
    std::vector<double> a_times;
    std::vector<double> b_times;
    std::vector<std::uint32_t> a_units; // unit index within A of each event
    std::vector<std::uint32_t> b_units;
    double horizon = 0.0;
};

struct Intensity {
    double a = 0.0; // per unit of A
    double b = 0.0; // per unit of B
};

// Intensities at time t given all events strictly before t.
Intensity intensity_at(const HawkesConfig& cfg, const EventRecord& history, double t);

// Ogata thinning on [0, horizon]. The dominating rate is
// max(2 * current total intensity, decay bound) and is refreshed after
// every event and every lookahead window of length 1 / rate. Throws
// NumericalError naming the branching ratio when the guards trip.
EventRecord simulate_hawkes(const HawkesConfig& cfg, double horizon, std::uint64_t seed);

// Events per unit per unit time over both populations.
double population_rate(const HawkesConfig& cfg, const EventRecord& events);

struct SparsityComparison {
    double phi_m = 0.0; // homogeneous mean rate
    double phi_r = 0.0; // heterogeneous mean rate
    double p_value = 1.0; // one-sided paired test of phi_r < phi_m
    std::vector<double> rates_m;
    std::vector<double> rates_r;
};

// Replicate i uses seed + i for both arms (paired); the heterogeneous spec
// is re-sampled per replicate. workers > 1 runs replicates concurrently.
SparsityComparison compare_sparsity(const HawkesSpec& homogeneous, const HawkesSpec& heterogeneous, double horizon,
                                    std::size_t n_seeds, std::uint64_t seed, std::size_t workers = 1);

// "population,time" rows.
void write_events_csv(std::ostream& os, const EventRecord& events);

} // namespace hrsnn
