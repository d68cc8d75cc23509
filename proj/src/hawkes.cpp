#include "hrsnn/hawkes.hpp"

#include "hrsnn/error.hpp"
#include "hrsnn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace hrsnn {

std::size_t HawkesConfig::n_a() const {
    return static_cast<std::size_t>(std::llround(alpha * static_cast<double>(n_total)));
}

void HawkesConfig::validate() const {
    if (n_total == 0) throw ConfigError("Hawkes process needs at least one unit");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
    if (!(mu_a >= 0.0) || !(mu_b >= 0.0)) throw ConfigError("baselines must be >= 0");
    if (!(feedback_cap >= 0.0)) throw ConfigError("feedback cap must be >= 0");
    const auto check = [](const std::vector<ExpKernel>& h, std::size_t sources, const char* name) {
        if (h.size() != 1 && h.size() != sources)
            throw ConfigError(std::string(name) + " needs 1 or " + std::to_string(sources) + " kernels");
        for (const auto& k : h)
            if (!(k.amplitude >= 0.0) || !(k.rate > 0.0) || !std::isfinite(k.amplitude) || !std::isfinite(k.rate))
                throw ConfigError(std::string(name) + " kernels need amplitude >= 0 and rate > 0");
    };
    check(h1, n_a(), "h1");
    check(h2, n_b(), "h2");
    check(h3, n_b(), "h3");
    check(h4, n_a(), "h4");
}

double HawkesConfig::branching_ratio() const {
    const auto mean_amp = [](const std::vector<ExpKernel>& h) {
        double s = 0.0;
        for (const auto& k : h) s += k.amplitude;
        return s / static_cast<double>(h.size());
    };
    return std::max(alpha * mean_amp(h1), (1.0 - alpha) * mean_amp(h3));
}

HawkesConfig HawkesSpec::sample(std::uint64_t seed) const {
    HawkesConfig c;
    c.n_total = n_total;
    c.alpha = alpha;
    c.mu_a = mu_a;
    c.mu_b = mu_b;
    c.feedback_cap = feedback_cap;
    Rng rng(seed);
    const auto draw = [&](const KernelDistribution& kd, std::size_t n) {
        const bool shared = kd.amplitude.family == Family::Degenerate && kd.rate.family == Family::Degenerate;
        std::vector<ExpKernel> out(shared ? 1 : n);
        const auto amp = kd.amplitude.with_support(std::max(kd.amplitude.lower, 0.0), kd.amplitude.upper);
        const auto rate = kd.rate.with_support(std::max(kd.rate.lower, std::numeric_limits<double>::min()), kd.rate.upper);
        for (auto& k : out) {
            k.amplitude = hrsnn::sample(amp, rng);
            k.rate = hrsnn::sample(rate, rng);
        }
        if (out.empty()) out.push_back({kd.amplitude.mean(), kd.rate.mean()});
        return out;
    };
    c.h1 = draw(h1, c.n_a());
    c.h2 = draw(h2, c.n_b());
    c.h3 = draw(h3, c.n_b());
    c.h4 = draw(h4, c.n_a());
    return c;
}

namespace {

// Lazily decayed exponential traces, one per source unit, for one kernel type.
class KernelTrace {
public:
    KernelTrace(const std::vector<ExpKernel>& kernels, std::size_t units, double inv_n)
        : kernels_(kernels), shared_(kernels.size() == 1), inv_n_(inv_n),
          value_(shared_ ? 1 : units, 0.0), stamp_(shared_ ? 1 : units, 0.0) {}

    // (1/N) sum_j a_j b_j sum_k exp(-b_j (t - t_k)) at time t.
    double at(double t) const {
        double s = 0.0;
        for (std::size_t j = 0; j < value_.size(); ++j) {
            if (value_[j] == 0.0) continue;
            const ExpKernel& k = kernels_[shared_ ? 0 : j];
            s += k.amplitude * k.rate * value_[j] * std::exp(-k.rate * (t - stamp_[j]));
        }
        return inv_n_ * s;
    }

    void add_event(std::size_t unit, double t) {
        const std::size_t j = shared_ ? 0 : unit;
        const ExpKernel& k = kernels_[j];
        value_[j] = value_[j] * std::exp(-k.rate * (t - stamp_[j])) + 1.0;
        stamp_[j] = t;
    }

private:
    const std::vector<ExpKernel>& kernels_;
    bool shared_;
    double inv_n_;
    std::vector<double> value_;
    std::vector<double> stamp_;
};

struct Drives {
    double x1 = 0.0, x2 = 0.0, x3 = 0.0, x4 = 0.0;
};

Intensity intensities(const HawkesConfig& c, const Drives& d) {
    return {(c.mu_a + d.x1) * std::exp(-d.x2), (c.mu_b + d.x3) + std::min(d.x4, c.feedback_cap)};
}

double kernel_sum(const std::vector<ExpKernel>& h, const std::vector<double>& times,
                  const std::vector<std::uint32_t>& units, double t, double inv_n) {
    double s = 0.0;
    for (std::size_t e = 0; e < times.size(); ++e) {
        if (!(times[e] < t)) continue;
        const ExpKernel& k = h.size() == 1 ? h[0] : h[units[e]];
        s += k.amplitude * k.rate * std::exp(-k.rate * (t - times[e]));
    }
    return inv_n * s;
}

std::string supercritical_message(const HawkesConfig& cfg, double t, const char* what) {
    std::ostringstream os;
    os << "supercritical Hawkes process (" << what << " at t = " << t
       << "); branching ratio = " << cfg.branching_ratio();
    return os.str();
}

} // namespace

Intensity intensity_at(const HawkesConfig& cfg, const EventRecord& h, double t) {
    cfg.validate();
    if (!(t >= 0.0)) throw InvalidArgument("intensity time must be >= 0");
    const double inv_n = 1.0 / static_cast<double>(cfg.n_total);
    Drives d;
    d.x1 = kernel_sum(cfg.h1, h.a_times, h.a_units, t, inv_n);
    d.x4 = kernel_sum(cfg.h4, h.a_times, h.a_units, t, inv_n);
    d.x2 = kernel_sum(cfg.h2, h.b_times, h.b_units, t, inv_n);
    d.x3 = kernel_sum(cfg.h3, h.b_times, h.b_units, t, inv_n);
    return intensities(cfg, d);
}

EventRecord simulate_hawkes(const HawkesConfig& cfg, double horizon, std::uint64_t seed) {
    cfg.validate();
    if (!(horizon > 0.0)) throw InvalidArgument("horizon must be > 0");
    const double inv_n = 1.0 / static_cast<double>(cfg.n_total);
    const auto n_a = static_cast<double>(cfg.n_a());
    const auto n_b = static_cast<double>(cfg.n_b());

    KernelTrace t1(cfg.h1, cfg.n_a(), inv_n), t4(cfg.h4, cfg.n_a(), inv_n);
    KernelTrace t2(cfg.h2, cfg.n_b(), inv_n), t3(cfg.h3, cfg.n_b(), inv_n);
    const auto drives = [&](double t) { return Drives{t1.at(t), t2.at(t), t3.at(t), t4.at(t)}; };

    Rng rng(seed);
    EventRecord rec;
    rec.horizon = horizon;
    double t = 0.0;
    while (t < horizon) {
        const Drives d = drives(t);
        const Intensity lam = intensities(cfg, d);
        const double total = n_a * lam.a + n_b * lam.b;
        // traces only decay between events, so this bounds the intensity until the next one
        const double decay_bound = n_a * (cfg.mu_a + d.x1) + n_b * (cfg.mu_b + d.x3 + std::min(d.x4, cfg.feedback_cap));
        const double bar = std::max(2.0 * total, decay_bound);
        if (!(bar > 0.0)) break; // nothing can fire any more
        if (!std::isfinite(bar) || bar > cfg.max_intensity) throw NumericalError(supercritical_message(cfg, t, "dominating rate overflow"));

        const double window = 1.0 / bar;
        const double wait = -std::log1p(-uniform01(rng)) / bar;
        if (wait > window) {
            t += window;
            continue;
        }
        t += wait;
        if (t >= horizon) break;
        const Intensity now = intensities(cfg, drives(t));
        const double total_now = n_a * now.a + n_b * now.b;
        if (total_now > bar * (1.0 + 1e-12)) throw NumericalError("thinning bound violated at t = " + std::to_string(t));
        const double u = uniform01(rng) * bar;
        if (u >= total_now) continue;

        // attribute the event to a population, then uniformly to a unit
        if (u < n_a * now.a) {
            const auto unit = static_cast<std::uint32_t>(std::min(n_a - 1.0, std::floor(u / now.a)));
            rec.a_times.push_back(t);
            rec.a_units.push_back(unit);
            t1.add_event(unit, t);
            t4.add_event(unit, t);
        } else {
            const auto unit = static_cast<std::uint32_t>(std::min(n_b - 1.0, std::floor((u - n_a * now.a) / now.b)));
            rec.b_times.push_back(t);
            rec.b_units.push_back(unit);
            t2.add_event(unit, t);
            t3.add_event(unit, t);
        }
        if (rec.a_times.size() + rec.b_times.size() > cfg.max_events)
            throw NumericalError(supercritical_message(cfg, t, "event budget exhausted"));
    }
    return rec;
}

double population_rate(const HawkesConfig& cfg, const EventRecord& events) {
    return static_cast<double>(events.a_times.size() + events.b_times.size()) /
           (static_cast<double>(cfg.n_total) * events.horizon);
}

SparsityComparison compare_sparsity(const HawkesSpec& homogeneous, const HawkesSpec& heterogeneous, double horizon,
                                    std::size_t n_seeds, std::uint64_t seed, std::size_t workers) {
    if (n_seeds < 2) throw InvalidArgument("compare_sparsity needs at least 2 replicates");
    SparsityComparison out;
    out.rates_m.resize(n_seeds);
    out.rates_r.resize(n_seeds);
    const auto replicate = [&](std::size_t i) {
        const std::uint64_t s = seed + i;
        const HawkesConfig hom = homogeneous.sample(s);
        const HawkesConfig het = heterogeneous.sample(s);
        out.rates_m[i] = population_rate(hom, simulate_hawkes(hom, horizon, s));
        out.rates_r[i] = population_rate(het, simulate_hawkes(het, horizon, s));
    };
    if (workers <= 1) {
        for (std::size_t i = 0; i < n_seeds; ++i) replicate(i);
    } else {
        for (std::size_t start = 0; start < n_seeds; start += workers) {
            std::vector<std::future<void>> batch;
            for (std::size_t i = start; i < std::min(n_seeds, start + workers); ++i)
                batch.push_back(std::async(std::launch::async, replicate, i));
            for (auto& f : batch) f.get();
        }
    }
    out.phi_m = mean(out.rates_m);
    out.phi_r = mean(out.rates_r);
    out.p_value = paired_t_test_greater(out.rates_m, out.rates_r).p_value;
    return out;
}

void write_events_csv(std::ostream& os, const EventRecord& events) {
    os << "population,time\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    std::size_t i = 0, j = 0;
    while (i < events.a_times.size() || j < events.b_times.size()) {
        const bool take_a = j >= events.b_times.size() || (i < events.a_times.size() && events.a_times[i] <= events.b_times[j]);
        if (take_a) os << "A," << events.a_times[i++] << '\n';
        else os << "B," << events.b_times[j++] << '\n';
    }
}

} // namespace hrsnn
