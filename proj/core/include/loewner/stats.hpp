#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace loewner::stats {

double mean(std::span<const double> xs);
// Unbiased sample variance (n - 1 denominator).
double variance(std::span<const double> xs);
double median(std::span<const double> xs);

double normal_cdf(double x);

// P[K > x] for the Kolmogorov distribution: 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_survival(double x);

struct KsResult {
  double statistic;
  double p_value;
};

// One-sample test against a continuous cdf (asymptotic p-value with the
// Stephens small-sample correction).
KsResult ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace loewner::stats
