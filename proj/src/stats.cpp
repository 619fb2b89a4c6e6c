#include "ivafuse/stats.hpp"

#include "ivafuse/types.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ivafuse::stats {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw Error("summarize: empty sample");
  Summary s;
  s.count = values.size();
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  std::vector<double> v(values.begin(), values.end());
  s.median = quantile(v, 0.5);
  s.q1 = quantile(v, 0.25);
  s.q3 = quantile(v, 0.75);
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

PairedTest paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw Error("paired_t_test: need two equal samples of size >= 2");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const Summary s = summarize(d);
  PairedTest out;
  out.mean_diff = s.mean;
  out.std_diff = s.std;
  out.df = static_cast<double>(d.size() - 1);
  const double se = s.std / std::sqrt(static_cast<double>(d.size()));
  const boost::math::students_t dist(out.df);
  const double tcrit = boost::math::quantile(boost::math::complement(dist, 0.025));
  if (se > 0.0) {
    out.t = s.mean / se;
    out.p_less = boost::math::cdf(dist, out.t);
  } else {
    out.t = s.mean < 0 ? -std::numeric_limits<double>::infinity()
          : s.mean > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    out.p_less = s.mean < 0 ? 0.0 : s.mean > 0 ? 1.0 : 0.5;
  }
  out.ci95_low = s.mean - tcrit * se;
  out.ci95_high = s.mean + tcrit * se;
  return out;
}

}  // namespace ivafuse::stats
