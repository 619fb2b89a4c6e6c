#pragma once

#include <span>
#include <vector>

namespace ivafuse::stats {

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample (N - 1) standard deviation; 0 for one value
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// Quantile with linear interpolation between order statistics (R type 7).
double quantile(std::vector<double> values, double q);

Summary summarize(std::span<const double> values);

/// Paired t statistics for a - b.
struct PairedTest {
  double mean_diff = 0.0;
  double std_diff = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p_less = 1.0;     // one-sided p for H1: mean(a - b) < 0
  double ci95_low = 0.0;   // two-sided 95% CI of the mean difference
  double ci95_high = 0.0;
};

PairedTest paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace ivafuse::stats
