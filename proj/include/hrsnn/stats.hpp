#pragma once

#include <span>
#include <vector>

namespace hrsnn {

double mean(std::span<const double> x);
// Unbiased sample standard deviation.
double sample_sd(std::span<const double> x);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double mean_difference = 0.0;
};

// One-sided paired t-test of H1: mean(a - b) > 0. With zero spread the
// p-value is 0 for a positive mean difference and 1 otherwise.
TestResult paired_t_test_greater(std::span<const double> a, std::span<const double> b);

// One-sample Kolmogorov-Smirnov test against Exponential(rate), asymptotic
// p-value.
TestResult ks_test_exponential(std::span<const double> samples, double rate);

} // namespace hrsnn
