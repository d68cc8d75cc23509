#include "hrsnn/neuron.hpp"

#include "hrsnn/error.hpp"

#include <cmath>
#include <limits>

namespace hrsnn {

void NeuronParams::validate() const {
    if (!(tau_m > 0.0)) throw InvalidArgument("tau_m must be > 0");
    if (!(t_ref >= 0.0)) throw InvalidArgument("t_ref must be >= 0");
    if (!(v_reset <= v_rest && v_rest < v_th))
        throw InvalidArgument("require v_reset <= v_rest < v_th");
}

double membrane_decay(double dt, double tau_m) {
    if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
    if (!(tau_m > 0.0)) throw InvalidArgument("tau_m must be > 0");
    return std::exp(-dt / tau_m);
}

StepResult lif_step(const NeuronState& state, const NeuronParams& params, double input_current,
                    double dt) {
    const double beta = membrane_decay(dt, params.tau_m);
    return lif_step_unchecked(state, params, beta, input_current, dt);
}

double euler_integrate(double v0, const NeuronParams& p, double input_current, double duration,
                       double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
    const auto steps = static_cast<long>(std::llround(duration / dt));
    double v = v0;
    for (long i = 0; i < steps; ++i) v += dt * (-(v - p.v_rest) + input_current) / p.tau_m;
    return v;
}

namespace {

double draw_tau(const DistributionSpec& d, double unit, Rng& rng) {
    if (d.family == Family::Degenerate && !(d.a > 0.0))
        throw ConfigError("degenerate tau_m must be > 0");
    // tau_m needs strictly positive support; non-positive draws are resampled
    const double lower = std::max(d.lower, std::numeric_limits<double>::min());
    return unit * sample(d.with_support(lower, d.upper), rng);
}

} // namespace

std::vector<NeuronParams> sample_neuron_population(const PopulationSpec& spec, std::size_t n_exc,
                                                   std::size_t n_inh, std::uint64_t seed) {
    spec.tau_m_exc.validate();
    spec.tau_m_inh.validate();
    if (!(spec.tau_m_unit > 0.0)) throw ConfigError("tau_m unit scale must be > 0");
    if (spec.v_th) {
        spec.v_th->validate();
        if (spec.v_th->family == Family::Gamma && spec.base.v_rest < 0.0)
            throw ConfigError("gamma threshold distribution requires v_rest >= 0");
    }
    spec.base.validate();

    Rng rng(seed);
    std::vector<NeuronParams> out;
    out.reserve(n_exc + n_inh);
    for (std::size_t i = 0; i < n_exc + n_inh; ++i) {
        NeuronParams p = spec.base;
        p.is_excitatory = i < n_exc;
        p.tau_m = draw_tau(p.is_excitatory ? spec.tau_m_exc : spec.tau_m_inh, spec.tau_m_unit, rng);
        if (spec.v_th) {
            // threshold must stay above rest
            auto d = spec.v_th->with_support(std::max(spec.v_th->lower, std::nextafter(p.v_rest, 1e300)),
                                             spec.v_th->upper);
            p.v_th = sample(d, rng);
        }
        out.push_back(p);
    }
    return out;
}

} // namespace hrsnn
