#include "hrsnn/datagen.hpp"

#include "hrsnn/distribution.hpp"
#include "hrsnn/error.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace hrsnn {

Eigen::MatrixXd Trajectory::columns_with_prefix(const std::string& prefix) const {
    std::vector<Eigen::Index> cols;
    for (std::size_t c = 0; c < labels.size(); ++c)
        if (labels[c].rfind(prefix, 0) == 0) cols.push_back(static_cast<Eigen::Index>(c));
    Eigen::MatrixXd out(values.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = values.col(cols[c]);
    return out;
}

void Lorenz96Config::validate() const {
    if (k < 4 || j < 4 || i < 4) throw ConfigError("Lorenz96 tier sizes must be >= 4");
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (!(duration >= 0.0) || !(burn_in >= 0.0)) throw ConfigError("duration and burn-in must be >= 0");
    if (!(sample_interval > 0.0)) throw ConfigError("sample_interval must be > 0");
    if (b == 0.0 || d == 0.0) throw ConfigError("b and d must be non-zero");
}

void lorenz96_derivative(const Lorenz96Config& cfg, const Eigen::VectorXd& s, Eigen::VectorXd& out) {
    const auto K = static_cast<long>(cfg.k), J = static_cast<long>(cfg.j), I = static_cast<long>(cfg.i);
    const long ny = J * K, nz = I * J * K;
    const double* x = s.data();
    const double* y = x + K;
    const double* z = y + ny;
    out.resize(s.size());
    double* dx = out.data();
    double* dy = dx + K;
    double* dz = dy + ny;
    const auto wrap = [](long idx, long n) { return ((idx % n) + n) % n; };
    const double hcb = cfg.h * cfg.c / cfg.b;
    const double hed = cfg.h * cfg.e / cfg.d;

    for (long kk = 0; kk < K; ++kk) {
        double ysum = 0.0;
        for (long jj = 0; jj < J; ++jj) ysum += y[kk * J + jj];
        dx[kk] = x[wrap(kk - 1, K)] * (x[wrap(kk + 1, K)] - x[wrap(kk - 2, K)]) + cfg.forcing - hcb * ysum;
        if (cfg.x_damping) dx[kk] -= x[kk];
    }
    for (long m = 0; m < ny; ++m) {
        double zsum = 0.0;
        for (long ii = 0; ii < I; ++ii) zsum += z[m * I + ii];
        dy[m] = -cfg.c * cfg.b * y[wrap(m + 1, ny)] * (y[wrap(m + 2, ny)] - y[wrap(m - 1, ny)]) - cfg.c * y[m] +
                hcb * x[m / J] - hed * zsum;
    }
    for (long q = 0; q < nz; ++q) {
        dz[q] = cfg.e * cfg.d * z[wrap(q - 1, nz)] * (z[wrap(q + 1, nz)] - z[wrap(q - 2, nz)]) - cfg.g * cfg.e * z[q] +
                hed * y[q / I];
    }
}

Eigen::VectorXd lorenz96_initial_state(const Lorenz96Config& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    Eigen::VectorXd s(static_cast<Eigen::Index>(cfg.state_size()));
    const auto K = static_cast<Eigen::Index>(cfg.k), ny = static_cast<Eigen::Index>(cfg.j * cfg.k);
    for (Eigen::Index q = 0; q < s.size(); ++q) {
        const double base = q < K ? cfg.x0 : (q < K + ny ? cfg.y0 : cfg.z0);
        s(q) = base + (cfg.perturbation > 0.0 ? cfg.perturbation * noise(rng) : 0.0);
    }
    return s;
}

namespace {

void rk4_step(const Lorenz96Config& cfg, Eigen::VectorXd& s, double dt, Eigen::VectorXd (&k)[4], Eigen::VectorXd& tmp) {
    lorenz96_derivative(cfg, s, k[0]);
    tmp = s + 0.5 * dt * k[0];
    lorenz96_derivative(cfg, tmp, k[1]);
    tmp = s + 0.5 * dt * k[1];
    lorenz96_derivative(cfg, tmp, k[2]);
    tmp = s + dt * k[2];
    lorenz96_derivative(cfg, tmp, k[3]);
    s += dt / 6.0 * (k[0] + 2.0 * k[1] + 2.0 * k[2] + k[3]);
}

long steps_for(double duration, double dt) { return static_cast<long>(std::llround(duration / dt)); }

} // namespace

Eigen::VectorXd lorenz96_integrate(const Lorenz96Config& cfg, Eigen::VectorXd state, double duration) {
    cfg.validate();
    Eigen::VectorXd k[4], tmp;
    const long steps = steps_for(duration, cfg.dt);
    for (long n = 0; n < steps; ++n) {
        rk4_step(cfg, state, cfg.dt, k, tmp);
        if (!state.allFinite()) throw NumericalError("Lorenz96 state blew up at step " + std::to_string(n));
    }
    return state;
}

Trajectory lorenz96_multiscale(const Lorenz96Config& cfg, std::uint64_t seed) {
    cfg.validate();
    Eigen::VectorXd s = lorenz96_integrate(cfg, lorenz96_initial_state(cfg, seed), cfg.burn_in);

    const long stride = std::max(1L, steps_for(cfg.sample_interval, cfg.dt));
    const long steps = steps_for(cfg.duration, cfg.dt);
    const long n_samples = steps / stride + 1;
    Trajectory traj;
    traj.values.resize(n_samples, s.size());
    for (std::size_t q = 0; q < cfg.k; ++q) traj.labels.push_back("X" + std::to_string(q));
    for (std::size_t q = 0; q < cfg.j * cfg.k; ++q)
        traj.labels.push_back("Y" + std::to_string(q % cfg.j) + "_" + std::to_string(q / cfg.j));
    for (std::size_t q = 0; q < cfg.i * cfg.j * cfg.k; ++q)
        traj.labels.push_back("Z" + std::to_string(q % cfg.i) + "_" + std::to_string((q / cfg.i) % cfg.j) + "_" +
                              std::to_string(q / (cfg.i * cfg.j)));

    Eigen::VectorXd k[4], tmp;
    long row = 0;
    for (long n = 0; n <= steps; ++n) {
        if (n % stride == 0 && row < n_samples) {
            traj.times.push_back(static_cast<double>(n) * cfg.dt);
            traj.values.row(row++) = s.transpose();
        }
        if (n == steps) break;
        rk4_step(cfg, s, cfg.dt, k, tmp);
        if (!s.allFinite()) throw NumericalError("Lorenz96 state blew up at step " + std::to_string(n));
    }
    traj.values.conservativeResize(row, Eigen::NoChange);
    return traj;
}

std::array<double, 3> lorenz63_derivative(const Lorenz63Config& c, const std::array<double, 3>& s) {
    return {c.sigma * (s[1] - s[0]), s[0] * (c.rho - s[2]) - s[1], s[0] * s[1] - c.beta * s[2]};
}

std::array<double, 3> lorenz63_integrate(const Lorenz63Config& cfg, std::array<double, 3> s, double duration) {
    if (!(cfg.dt > 0.0)) throw ConfigError("dt must be > 0");
    const auto axpy = [](const std::array<double, 3>& a, double h, const std::array<double, 3>& b) {
        return std::array<double, 3>{a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]};
    };
    const long steps = steps_for(duration, cfg.dt);
    const double h = cfg.dt;
    for (long n = 0; n < steps; ++n) {
        const auto k1 = lorenz63_derivative(cfg, s);
        const auto k2 = lorenz63_derivative(cfg, axpy(s, 0.5 * h, k1));
        const auto k3 = lorenz63_derivative(cfg, axpy(s, 0.5 * h, k2));
        const auto k4 = lorenz63_derivative(cfg, axpy(s, h, k3));
        for (int q = 0; q < 3; ++q) s[q] += h / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
        if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || !std::isfinite(s[2]))
            throw NumericalError("Lorenz63 state blew up at step " + std::to_string(n));
    }
    return s;
}

Trajectory lorenz63(const Lorenz63Config& cfg) {
    auto s = lorenz63_integrate(cfg, cfg.x0, cfg.burn_in);
    const long steps = steps_for(cfg.duration, cfg.dt);
    Trajectory traj;
    traj.labels = {"x", "y", "z"};
    traj.values.resize(steps + 1, 3);
    for (long n = 0; n <= steps; ++n) {
        traj.times.push_back(static_cast<double>(n) * cfg.dt);
        for (int q = 0; q < 3; ++q) traj.values(n, q) = s[q];
        if (n < steps) s = lorenz63_integrate(cfg, s, cfg.dt);
    }
    return traj;
}

std::vector<double> iid_uniform(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = 2.0 * uniform01(rng) - 1.0;
    return out;
}

SpikeClassData synthetic_spike_classes(const SpikeClassConfig& cfg, std::uint64_t seed) {
    if (cfg.n_classes < 2) throw ConfigError("need at least 2 classes");
    if (!(cfg.test_fraction >= 0.0 && cfg.test_fraction < 1.0)) throw ConfigError("test_fraction must lie in [0, 1)");
    if (!(cfg.deletion >= 0.0 && cfg.deletion <= 1.0)) throw ConfigError("deletion must lie in [0, 1]");
    if (!(cfg.jitter >= 0.0)) throw ConfigError("jitter must be >= 0");
    const auto n_bins = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
    Rng rng(seed);
    std::normal_distribution<double> jitter(0.0, cfg.jitter > 0.0 ? cfg.jitter : 1.0);

    SpikeClassData data;
    const double p = cfg.template_rate * cfg.dt * 1e-3;
    for (int c = 0; c < cfg.n_classes; ++c) {
        SpikeRaster t(cfg.n_channels, n_bins, cfg.dt);
        for (std::size_t b = 0; b < n_bins; ++b)
            for (std::size_t ch = 0; ch < cfg.n_channels; ++ch)
                if (uniform01(rng) < p) t.set(ch, b);
        data.templates.push_back(std::move(t));
    }

    const auto n_test = static_cast<std::size_t>(std::llround(cfg.test_fraction * static_cast<double>(cfg.samples_per_class)));
    for (std::size_t s = 0; s < cfg.samples_per_class; ++s) {
        for (int c = 0; c < cfg.n_classes; ++c) {
            const SpikeRaster& tpl = data.templates[static_cast<std::size_t>(c)];
            SpikeRaster sample(cfg.n_channels, n_bins, cfg.dt);
            for (std::size_t b = 0; b < n_bins; ++b)
                for (std::size_t ch = 0; ch < cfg.n_channels; ++ch) {
                    if (!tpl.get(ch, b)) continue;
                    if (cfg.deletion > 0.0 && uniform01(rng) < cfg.deletion) continue;
                    long nb = static_cast<long>(b);
                    if (cfg.jitter > 0.0) nb = std::lround((static_cast<double>(b) * cfg.dt + jitter(rng)) / cfg.dt);
                    if (nb >= 0 && nb < static_cast<long>(n_bins)) sample.set(ch, static_cast<std::size_t>(nb));
                }
            const bool to_test = s >= cfg.samples_per_class - n_test;
            (to_test ? data.test : data.train).push_back(std::move(sample));
            (to_test ? data.test_labels : data.train_labels).push_back(c);
        }
    }
    return data;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "time";
    for (const auto& l : traj.labels) os << ',' << l;
    os << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index r = 0; r < traj.values.rows(); ++r) {
        os << traj.times[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < traj.values.cols(); ++c) os << ',' << traj.values(r, c);
        os << '\n';
    }
}

} // namespace hrsnn
