#include "hrsnn/distribution.hpp"

#include "hrsnn/error.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>

namespace hrsnn {

std::string to_string(Family f) {
    switch (f) {
    case Family::Normal: return "normal";
    case Family::Gamma: return "gamma";
    case Family::LogNormal: return "lognormal";
    case Family::Degenerate: return "degenerate";
    }
    return "?";
}

Family family_from_string(const std::string& name) {
    if (name == "normal") return Family::Normal;
    if (name == "gamma") return Family::Gamma;
    if (name == "lognormal") return Family::LogNormal;
    if (name == "degenerate" || name == "fixed") return Family::Degenerate;
    throw ConfigError("unknown distribution family '" + name + "'");
}

DistributionSpec DistributionSpec::normal(double mean, double sd) {
    return {Family::Normal, mean, sd};
}

DistributionSpec DistributionSpec::gamma(double shape, double scale) {
    return {Family::Gamma, shape, scale};
}

DistributionSpec DistributionSpec::degenerate(double value) {
    return {Family::Degenerate, value, 0.0};
}

DistributionSpec DistributionSpec::lognormal_with_mean(double mean, double log_sd) {
    if (mean == 0.0) return degenerate(0.0);
    if (!(mean > 0.0)) throw ConfigError("lognormal mean must be >= 0");
    return {Family::LogNormal, std::log(mean) - 0.5 * log_sd * log_sd, log_sd};
}

DistributionSpec DistributionSpec::with_support(double lo, double hi) const {
    DistributionSpec d = *this;
    d.lower = lo;
    d.upper = hi;
    return d;
}

void DistributionSpec::validate() const {
    if (!std::isfinite(a) || std::isnan(b))
        throw ConfigError("distribution parameters must be finite");
    if (!(lower <= upper))
        throw ConfigError("distribution support bounds are inverted");
    switch (family) {
    case Family::Normal:
        if (b < 0.0) throw ConfigError("normal sd must be >= 0");
        break;
    case Family::Gamma:
        if (!(a > 0.0) || !(b > 0.0))
            throw ConfigError("gamma shape and scale must be > 0");
        break;
    case Family::LogNormal:
        if (b < 0.0) throw ConfigError("lognormal log-sd must be >= 0");
        break;
    case Family::Degenerate:
        break;
    }
}

double DistributionSpec::mean() const {
    switch (family) {
    case Family::Normal: return a;
    case Family::Gamma: return a * b;
    case Family::LogNormal: return std::exp(a + 0.5 * b * b);
    case Family::Degenerate: return a;
    }
    return a;
}

double DistributionSpec::variance() const {
    switch (family) {
    case Family::Normal: return b * b;
    case Family::Gamma: return a * b * b;
    case Family::LogNormal: return (std::exp(b * b) - 1.0) * std::exp(2.0 * a + b * b);
    case Family::Degenerate: return 0.0;
    }
    return 0.0;
}

double DistributionSpec::quantile(double u) const {
    switch (family) {
    case Family::Normal:
        if (b == 0.0) return a;
        return boost::math::quantile(boost::math::normal_distribution<double>(a, b), u);
    case Family::Gamma:
        return boost::math::quantile(boost::math::gamma_distribution<double>(a, b), u);
    case Family::LogNormal:
        if (b == 0.0) return std::exp(a);
        return boost::math::quantile(boost::math::lognormal_distribution<double>(a, b), u);
    case Family::Degenerate:
        return a;
    }
    return a;
}

double sample(const DistributionSpec& d, Rng& rng, int max_retries) {
    d.validate();
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        double x = 0.0;
        switch (d.family) {
        case Family::Normal:
            x = d.b == 0.0 ? d.a : std::normal_distribution<double>(d.a, d.b)(rng);
            break;
        case Family::Gamma:
            x = std::gamma_distribution<double>(d.a, d.b)(rng);
            break;
        case Family::LogNormal:
            x = d.b == 0.0 ? std::exp(d.a) : std::lognormal_distribution<double>(d.a, d.b)(rng);
            break;
        case Family::Degenerate:
            x = d.a;
            break;
        }
        if (x >= d.lower && x <= d.upper) return x;
        if (d.family == Family::Degenerate || (d.family == Family::Normal && d.b == 0.0))
            break;
    }
    throw ConfigError("distribution " + to_string(d.family) + "(" + std::to_string(d.a) + ", " +
                      std::to_string(d.b) + ") produced no sample inside its support after " +
                      std::to_string(max_retries) + " retries");
}

std::vector<double> sample_n(const DistributionSpec& d, std::size_t n, Rng& rng,
                             int max_retries) {
    std::vector<double> out(n);
    for (auto& x : out) x = sample(d, rng, max_retries);
    return out;
}

} // namespace hrsnn
