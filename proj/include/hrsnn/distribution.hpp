#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace hrsnn {

using Rng = std::mt19937_64;

enum class Family { Normal, Gamma, LogNormal, Degenerate };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

// Parametric scalar distribution. For Normal, a = mean and b = standard
// deviation; for Gamma, a = shape and b = scale; for LogNormal, a and b are
// the mean and sd of log(x); for Degenerate, a is the value and b is
// ignored. Samples are truncated to [lower, upper].
struct DistributionSpec {
    Family family = Family::Degenerate;
    double a = 0.0;
    double b = 0.0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    static DistributionSpec normal(double mean, double sd);
    static DistributionSpec gamma(double shape, double scale);
    static DistributionSpec degenerate(double value);
    // LogNormal with the given mean and log-scale sd.
    static DistributionSpec lognormal_with_mean(double mean, double log_sd);

    DistributionSpec with_support(double lo, double hi) const;

    // Throws ConfigError when parameters are invalid.
    void validate() const;

    double mean() const;
    double variance() const;

    // Inverse CDF of the untruncated family. u in (0, 1).
    double quantile(double u) const;

    bool operator==(const DistributionSpec&) const = default;
};

// Uniform double in [0, 1) built from the top 53 bits; unlike
// std::uniform_real_distribution its output is fixed across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Draws one sample, rejecting values outside the support. Gives up with a
// ConfigError after max_retries rejections.
double sample(const DistributionSpec& d, Rng& rng, int max_retries = 1000);

std::vector<double> sample_n(const DistributionSpec& d, std::size_t n, Rng& rng,
                             int max_retries = 1000);

} // namespace hrsnn
