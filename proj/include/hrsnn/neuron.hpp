#pragma once

#include "hrsnn/distribution.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hrsnn {

// Leaky integrate-and-fire constants. Voltages in mV, times in ms.
struct NeuronParams {
    double tau_m = 20.0;  // membrane time constant
    double v_th = 1.0;    // firing threshold
    double v_rest = 0.0;  // resting potential
    double v_reset = 0.0; // reset potential
    double t_ref = 2.0;   // refractory period
    bool is_excitatory = true;

    // Throws InvalidArgument unless tau_m > 0, t_ref >= 0 and v_reset <= v_rest < v_th.
    void validate() const;

    bool operator==(const NeuronParams&) const = default;
};

struct NeuronState {
    double v = 0.0;
    double refractory_remaining = 0.0;

    bool operator==(const NeuronState&) const = default;
};

struct StepResult {
    NeuronState state;
    bool spiked = false;
};

// Decay factor of the exact exponential update, exp(-dt / tau_m).
double membrane_decay(double dt, double tau_m);

// One exact-exponential step of the LIF equation:
//   v' = beta (v - v_rest) + v_rest + (1 - beta) I,  beta = exp(-dt / tau_m).
// While refractory the potential is held at v_reset. A crossing of v_th is
// detected after the update and assigned to the end of the bin.
StepResult lif_step(const NeuronState& state, const NeuronParams& params,
                    double input_current, double dt);

// Same update with beta precomputed; used by the simulation kernels.
// No argument checks.
inline StepResult lif_step_unchecked(NeuronState s, const NeuronParams& p, double beta,
                                     double input_current, double dt) {
    if (s.refractory_remaining > 0.0) {
        s.refractory_remaining -= dt;
        // guard against accumulated rounding in repeated subtraction
        if (s.refractory_remaining < 1e-9) s.refractory_remaining = 0.0;
        s.v = p.v_reset;
        return {s, false};
    }
    s.v = beta * (s.v - p.v_rest) + p.v_rest + (1.0 - beta) * input_current;
    if (s.v >= p.v_th) {
        s.v = p.v_reset;
        s.refractory_remaining = p.t_ref;
        return {s, true};
    }
    return {s, false};
}

// Forward-Euler reference integration of dv/dt = (-(v - v_rest) + I) / tau_m,
// without threshold. Used to validate the exponential scheme.
double euler_integrate(double v0, const NeuronParams& p, double input_current, double duration,
                       double dt);

struct PopulationSpec {
    DistributionSpec tau_m_exc = DistributionSpec::degenerate(20.0);
    DistributionSpec tau_m_inh = DistributionSpec::degenerate(20.0);
    // Multiplies every tau_m draw; lets the unit-free Gamma fits be mapped to ms.
    double tau_m_unit = 1.0;
    // When set, v_th is drawn per neuron; otherwise base.v_th is used.
    std::optional<DistributionSpec> v_th;
    NeuronParams base;
};

// Samples n_exc excitatory neurons followed by n_inh inhibitory ones.
// Deterministic in seed. Throws ConfigError for an unsupported family or a
// distribution that cannot produce positive tau_m.
std::vector<NeuronParams> sample_neuron_population(const PopulationSpec& spec, std::size_t n_exc,
                                                   std::size_t n_inh, std::uint64_t seed);

} // namespace hrsnn
