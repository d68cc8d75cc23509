#include "hrsnn/plasticity.hpp"

#include "hrsnn/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hrsnn {

void StdpParams::validate() const {
    if (!(tau_plus > 0.0) || !(tau_minus > 0.0)) throw InvalidArgument("STDP tau must be > 0");
    if (!(eta_plus >= 0.0) || !(eta_minus >= 0.0)) throw InvalidArgument("STDP eta must be >= 0");
    if (!(w_min < w_max)) throw InvalidArgument("STDP requires w_min < w_max");
}

double stdp_delta(const StdpParams& p, double w, double delta_t) {
    if (!(w >= p.w_min && w <= p.w_max))
        throw InvalidArgument("weight " + std::to_string(w) + " outside [w_min, w_max]");
    if (delta_t >= 0.0)
        return p.eta_plus * (p.w_max - w) * std::exp(-std::abs(delta_t) / p.tau_plus);
    return -p.eta_minus * (w - p.w_min) * std::exp(-std::abs(delta_t) / p.tau_minus);
}

double apply_stdp(const StdpParams& p, double w, double delta_t) {
    return std::clamp(w + stdp_delta(p, w, delta_t), p.w_min, p.w_max);
}

StdpDistributions StdpDistributions::homogeneous() const {
    return {DistributionSpec::degenerate(tau_plus.mean()),
            DistributionSpec::degenerate(tau_minus.mean()),
            DistributionSpec::degenerate(eta_plus.mean()),
            DistributionSpec::degenerate(eta_minus.mean())};
}

std::vector<StdpParams> sample_stdp_population(const StdpDistributions& dists, double w_min,
                                               double w_max, std::size_t n_synapses,
                                               std::uint64_t seed) {
    if (!(w_min < w_max)) throw ConfigError("STDP weight bounds inverted (w_min >= w_max)");
    for (const auto* d : {&dists.tau_plus, &dists.tau_minus, &dists.eta_plus, &dists.eta_minus})
        d->validate();

    constexpr double tiny = std::numeric_limits<double>::min();
    const auto positive = [&](const DistributionSpec& d) {
        return d.with_support(std::max(d.lower, tiny), d.upper);
    };
    const auto nonneg = [&](const DistributionSpec& d) {
        return d.with_support(std::max(d.lower, 0.0), d.upper);
    };
    const DistributionSpec tp = positive(dists.tau_plus), tm = positive(dists.tau_minus);
    const DistributionSpec ep = nonneg(dists.eta_plus), em = nonneg(dists.eta_minus);

    Rng rng(seed);
    std::vector<StdpParams> out(n_synapses);
    for (auto& s : out) {
        s.tau_plus = sample(tp, rng);
        s.tau_minus = sample(tm, rng);
        s.eta_plus = sample(ep, rng);
        s.eta_minus = sample(em, rng);
        s.w_min = w_min;
        s.w_max = w_max;
    }
    return out;
}

} // namespace hrsnn
