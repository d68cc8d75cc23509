#include "hrsnn/gp.hpp"

#include "hrsnn/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace hrsnn {

double matern(double d, double length_scale, double variance, double nu) {
    const double r = d / length_scale;
    if (nu == 0.5) return variance * std::exp(-r);
    if (nu == 1.5) {
        const double s = std::sqrt(3.0) * r;
        return variance * (1.0 + s) * std::exp(-s);
    }
    if (nu == 2.5) {
        const double s = std::sqrt(5.0) * r;
        return variance * (1.0 + s + 5.0 * r * r / 3.0) * std::exp(-s);
    }
    throw InvalidArgument("Matern smoothness must be 0.5, 1.5 or 2.5");
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mean, double sd, double best) {
    const double gain = mean - best;
    if (!(sd > 0.0)) return std::max(gain, 0.0);
    const double z = gain / sd;
    return std::max(gain * normal_cdf(z) + sd * normal_pdf(z), 0.0);
}

namespace {

struct Factorized {
    Eigen::MatrixXd l;
    Eigen::VectorXd alpha;
    double jitter = 0.0;
    double lml = -std::numeric_limits<double>::infinity();
    bool ok = false;
};

Factorized factorize(const Eigen::MatrixXd& dist, const Eigen::VectorXd& centered, double length_scale,
                     double variance, double nu, double noise) {
    const Eigen::Index n = dist.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) k(i, j) = k(j, i) = matern(dist(i, j), length_scale, variance, nu);
    Factorized f;
    for (double jitter = 1e-10; jitter <= 1e-4 * 1.0001; jitter *= 10.0) {
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += (noise + jitter) * variance;
        Eigen::LLT<Eigen::MatrixXd> llt(kj);
        if (llt.info() != Eigen::Success) continue;
        f.l = llt.matrixL();
        f.alpha = llt.solve(centered);
        f.jitter = jitter;
        f.lml = -0.5 * centered.dot(f.alpha) - f.l.diagonal().array().log().sum() -
                0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
        f.ok = true;
        return f;
    }
    return f;
}

double median_offdiagonal(const Eigen::MatrixXd& d) {
    std::vector<double> v;
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j)
            if (d(i, j) > 0.0) v.push_back(d(i, j));
    if (v.empty()) return 1.0;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

} // namespace

GpSurrogate gp_fit(const Eigen::MatrixXd& distances, const Eigen::VectorXd& values, const KernelConfig& cfg) {
    const Eigen::Index n = values.size();
    if (n < 1) throw InvalidArgument("GP needs at least one observation");
    if (distances.rows() != n || distances.cols() != n) throw InvalidArgument("distance matrix has the wrong shape");
    if (!values.allFinite()) throw DataError("GP observations contain NaN or Inf");
    if (!(cfg.length_scale > 0.0) || !(cfg.variance > 0.0) || !(cfg.noise >= 0.0))
        throw InvalidArgument("GP kernel needs length_scale > 0, variance > 0, noise >= 0");

    GpSurrogate gp;
    gp.kernel = cfg;
    gp.values = values;
    gp.prior_mean = values.mean();
    const Eigen::VectorXd centered = values.array() - gp.prior_mean;

    Factorized best;
    if (cfg.fit_hyperparameters && n >= 2) {
        double var_y = centered.squaredNorm() / static_cast<double>(n);
        if (!(var_y > 0.0)) var_y = 1.0;
        const double med = median_offdiagonal(distances);
        const int g = std::max(cfg.grid_size, 2);
        for (int a = 0; a < g; ++a) {
            // length scales from med/100 to 30 med, variances from var/100 to 100 var
            const double ls = med * std::pow(10.0, -2.0 + 3.5 * a / (g - 1));
            for (int b = 0; b < g; ++b) {
                const double var = var_y * std::pow(10.0, -2.0 + 4.0 * b / (g - 1));
                Factorized f = factorize(distances, centered, ls, var, cfg.nu, cfg.noise);
                if (f.ok && f.lml > best.lml) {
                    best = std::move(f);
                    gp.kernel.length_scale = ls;
                    gp.kernel.variance = var;
                }
            }
        }
    } else {
        best = factorize(distances, centered, cfg.length_scale, cfg.variance, cfg.nu, cfg.noise);
    }
    if (!best.ok) throw NumericalError("GP Gram matrix is not positive definite even with jitter 1e-4");
    gp.chol_l = std::move(best.l);
    gp.alpha = std::move(best.alpha);
    gp.jitter = best.jitter;
    gp.log_marginal_likelihood = best.lml;
    return gp;
}

GpPrediction gp_predict(const GpSurrogate& gp, const Eigen::VectorXd& d) {
    if (d.size() != gp.size()) throw InvalidArgument("query needs one distance per observed point");
    Eigen::VectorXd k(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) k(i) = matern(d(i), gp.kernel.length_scale, gp.kernel.variance, gp.kernel.nu);
    GpPrediction p;
    p.mean = gp.prior_mean + k.dot(gp.alpha);
    const Eigen::VectorXd v = gp.chol_l.triangularView<Eigen::Lower>().solve(k);
    p.sd = std::sqrt(std::max(gp.kernel.variance - v.squaredNorm(), 0.0));
    return p;
}

} // namespace hrsnn
