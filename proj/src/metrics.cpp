#include "hrsnn/metrics.hpp"

#include "hrsnn/distribution.hpp"
#include "hrsnn/network.hpp"
#include "hrsnn/readout.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

namespace hrsnn {

double squared_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidArgument("correlation of sequences with different lengths");
    const auto n = static_cast<double>(a.size());
    if (a.size() < 2) return 0.0;
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    // guard against variance that is pure rounding noise
    if (saa <= 1e-24 * n || sbb <= 1e-24 * n) return 0.0;
    return std::clamp(sab * sab / (saa * sbb), 0.0, 1.0);
}

CapacityReport memory_capacity(const Eigen::MatrixXd& states, std::span<const double> input,
                               const CapacityConfig& cfg) {
    if (static_cast<std::size_t>(states.rows()) != input.size())
        throw InvalidArgument("states and input must have the same number of time steps");
    if (cfg.tau_max == 0) throw InvalidArgument("tau_max must be >= 1");
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
        throw InvalidArgument("train_fraction must lie in (0, 1)");
    if (!states.allFinite()) throw DataError("states contain NaN or Inf");

    const std::size_t first = cfg.washout + cfg.tau_max;
    if (input.size() <= first) throw DataError("not enough samples for tau_max and washout");
    const std::size_t n = input.size() - first;
    const auto n_train = static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(n)));
    const std::size_t n_test = n - n_train;
    if (n_train < 10 || n_test < 10)
        throw DataError("memory capacity needs at least 10 training and 10 test samples, got " +
                        std::to_string(n_train) + "/" + std::to_string(n_test));

    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), first);
    if (cfg.shuffle) {
        Rng rng(cfg.seed);
        for (std::size_t i = rows.size(); i > 1; --i)
            std::swap(rows[i - 1], rows[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i))]);
    }

    const auto k = static_cast<Eigen::Index>(cfg.tau_max);
    Eigen::MatrixXd x_train(static_cast<Eigen::Index>(n_train), states.cols());
    Eigen::MatrixXd x_test(static_cast<Eigen::Index>(n_test), states.cols());
    Eigen::MatrixXd y_train(static_cast<Eigen::Index>(n_train), k);
    Eigen::MatrixXd y_test(static_cast<Eigen::Index>(n_test), k);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t t = rows[r];
        const bool train = r < n_train;
        const auto row = static_cast<Eigen::Index>(train ? r : r - n_train);
        (train ? x_train : x_test).row(row) = states.row(static_cast<Eigen::Index>(t));
        for (Eigen::Index d = 0; d < k; ++d) (train ? y_train : y_test)(row, d) = input[t - static_cast<std::size_t>(d) - 1];
    }

    // every delay shares the same design matrix, so one factorization serves all
    const ReadoutModel model = fit_ridge(x_train, y_train, cfg.ridge);
    const Eigen::MatrixXd y_hat = predict(model, x_test);

    CapacityReport report;
    report.tau_max = cfg.tau_max;
    report.per_delay.resize(cfg.tau_max);
#pragma omp parallel for schedule(static)
    for (long d = 0; d < static_cast<long>(k); ++d) {
        std::vector<double> target(n_test), pred(n_test);
        for (std::size_t r = 0; r < n_test; ++r) {
            target[r] = y_test(static_cast<Eigen::Index>(r), d);
            pred[r] = y_hat(static_cast<Eigen::Index>(r), d);
        }
        report.per_delay[static_cast<std::size_t>(d)] = squared_correlation(target, pred);
    }
    report.total = std::accumulate(report.per_delay.begin(), report.per_delay.end(), 0.0);
    return report;
}

EfficiencyReport spike_efficiency(double capacity, double mean_spikes) {
    if (!(mean_spikes > 0.0)) throw EfficiencyUndefined("spike efficiency is undefined for a silent network");
    return {capacity, mean_spikes, capacity / mean_spikes};
}

EfficiencyReport spike_efficiency(const CapacityReport& report, const SpikeRaster& raster) {
    return spike_efficiency(report.total, total_spike_count(raster).per_neuron);
}

Eigen::MatrixXd state_covariance(const Eigen::MatrixXd& states) {
    if (states.rows() < 2) throw DataError("covariance needs at least 2 samples");
    const Eigen::MatrixXd centered = states.rowwise() - states.colwise().mean();
    return centered.transpose() * centered / static_cast<double>(states.rows() - 1);
}

HeterogeneityReport heterogeneity_entropy(const Eigen::MatrixXd& params, double eps) {
    if (params.rows() < params.cols() + 1)
        throw DataError("heterogeneity needs at least dims + 1 samples, got " + std::to_string(params.rows()));
    Eigen::MatrixXd cov = state_covariance(params);
    HeterogeneityReport r;
    r.degenerate = (cov.diagonal().array() <= 0.0).all();
    cov.diagonal().array() += eps;
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw NumericalError("parameter covariance is not positive definite");
    r.log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return r;
}

double eigen_heterogeneity(const Eigen::MatrixXd& cov) {
    if (cov.rows() != cov.cols() || cov.rows() == 0) throw InvalidArgument("covariance must be square");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    const Eigen::ArrayXd lambda = es.eigenvalues().array().max(0.0);
    const double s = lambda.sum();
    if (!(s > 0.0)) throw DataError("eigenvalue heterogeneity is undefined for a zero covariance");
    return lambda.square().sum() / (s * s);
}

std::vector<double> avg_firing_rate(const SpikeRaster& raster, std::size_t window_bins) {
    auto counts = windowed_spike_counts(raster, window_bins);
    const double window_ms = static_cast<double>(window_bins) * raster.dt();
    for (auto& c : counts) c = c / window_ms * 1000.0;
    return counts;
}

double nrmse(const Eigen::MatrixXd& prediction, const Eigen::MatrixXd& target) {
    if (prediction.rows() != target.rows() || prediction.cols() != target.cols())
        throw InvalidArgument("prediction and target shapes differ");
    if (target.size() < 2) throw DataError("nrmse needs at least 2 values");
    const double rmse = std::sqrt((prediction - target).squaredNorm() / static_cast<double>(target.size()));
    const double mean = target.mean();
    const double sd = std::sqrt((target.array() - mean).square().sum() / static_cast<double>(target.size()));
    if (!(sd > 0.0)) throw DataError("nrmse undefined for a constant target");
    return rmse / sd;
}

void write_capacity_csv(std::ostream& os, const CapacityReport& report) {
    os << "tau,c_tau\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < report.per_delay.size(); ++i) os << i + 1 << ',' << report.per_delay[i] << '\n';
    os << "total," << report.total << '\n';
}

} // namespace hrsnn
