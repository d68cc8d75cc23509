#include "hrsnn/stats.hpp"

#include "hrsnn/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hrsnn {

double mean(std::span<const double> x) {
    if (x.empty()) throw InvalidArgument("mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
    if (x.size() < 2) throw InvalidArgument("standard deviation needs at least 2 values");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

TestResult paired_t_test_greater(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw InvalidArgument("paired test needs two equal samples of size >= 2");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    TestResult r;
    r.mean_difference = mean(d);
    const double sd = sample_sd(d);
    if (!(sd > 0.0)) {
        r.statistic = r.mean_difference > 0.0 ? INFINITY : (r.mean_difference < 0.0 ? -INFINITY : 0.0);
        r.p_value = r.mean_difference > 0.0 ? 0.0 : 1.0;
        return r;
    }
    const auto n = static_cast<double>(d.size());
    r.statistic = r.mean_difference / (sd / std::sqrt(n));
    const boost::math::students_t dist(n - 1.0);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    return r;
}

TestResult ks_test_exponential(std::span<const double> samples, double rate) {
    if (samples.empty()) throw InvalidArgument("KS test needs samples");
    if (!(rate > 0.0)) throw InvalidArgument("rate must be > 0");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const auto n = static_cast<double>(x.size());
    double dmax = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = 1.0 - std::exp(-rate * x[i]);
        dmax = std::max({dmax, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    // Kolmogorov limiting distribution with the small-sample correction of Stephens
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * dmax;
    double p = 0.0;
    if (lambda < 0.3) p = 1.0; // series converges poorly here; the tail mass is ~1
    else for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    TestResult r;
    r.statistic = dmax;
    r.p_value = std::clamp(p, 0.0, 1.0);
    return r;
}

} // namespace hrsnn
