#include "ivafuse/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ivafuse::kernels {

namespace {

void check_kernel_args(const Matrix& a, const Matrix& b, double sigma) {
  if (!(sigma > 0.0)) throw Error("gaussian_kernel: sigma must be positive");
  if (a.rows() != b.rows()) throw Error("gaussian_kernel: feature dimensions differ");
}

inline double kernel_entry(const Matrix& a, Index i, const Matrix& b, Index j, double inv_two_s2) {
  double d2 = 0.0;
  for (Index r = 0; r < a.rows(); ++r) {
    const double diff = a(r, i) - b(r, j);
    d2 += diff * diff;
  }
  return std::exp(-d2 * inv_two_s2);
}

void check_slices(std::span<const Matrix> y) {
  if (y.empty()) throw Error("scv_statistics: no slices");
  for (const auto& m : y) {
    if (m.rows() != y[0].rows() || m.cols() != y[0].cols()) throw Error("scv_statistics: slice shapes differ");
  }
}

Matrix radii(std::span<const Matrix> y) {
  Matrix r = Matrix::Zero(y[0].rows(), y[0].cols());
  for (const auto& m : y) r += m.cwiseAbs2();
  return r.cwiseSqrt();
}

double ordered_sum(const Matrix& r) {
  double s = 0.0;
  for (Index n = 0; n < r.cols(); ++n) {
    for (Index p = 0; p < r.rows(); ++p) s += r(p, n);
  }
  return s;
}

// Row p of (1/N) Phi y^T for slice k.
void score_row(const Matrix& yk, const Matrix& r, Index p, Matrix& out) {
  const Index n_samples = yk.cols();
  const Index order = yk.rows();
  for (Index q = 0; q < order; ++q) {
    double acc = 0.0;
    for (Index n = 0; n < n_samples; ++n) {
      acc += yk(p, n) / std::max(r(p, n), kRadiusEpsilon) * yk(q, n);
    }
    out(p, q) = acc / static_cast<double>(n_samples);
  }
}

double median_of(std::vector<double>& d) {
  if (d.empty()) throw Error("median_pairwise_distance: need at least two points");
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  if (d.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(d.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

Matrix gaussian_kernel_serial(const Matrix& a, const Matrix& b, double sigma) {
  check_kernel_args(a, b, sigma);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  Matrix k(a.cols(), b.cols());
  for (Index j = 0; j < b.cols(); ++j) {
    for (Index i = 0; i < a.cols(); ++i) k(i, j) = kernel_entry(a, i, b, j, inv);
  }
  return k;
}

Matrix gaussian_kernel(const Matrix& a, const Matrix& b, double sigma) {
  check_kernel_args(a, b, sigma);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  Matrix k(a.cols(), b.cols());
  const long cols = static_cast<long>(b.cols());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < cols; ++j) {
    for (Index i = 0; i < a.cols(); ++i) k(i, j) = kernel_entry(a, i, b, j, inv);
  }
  return k;
}

ScvStatistics scv_statistics_serial(std::span<const Matrix> y) {
  check_slices(y);
  const Matrix r = radii(y);
  ScvStatistics out;
  out.radius_sum = ordered_sum(r);
  for (const auto& yk : y) {
    Matrix c(yk.rows(), yk.rows());
    for (Index p = 0; p < yk.rows(); ++p) score_row(yk, r, p, c);
    out.score_cov.push_back(std::move(c));
  }
  return out;
}

ScvStatistics scv_statistics(std::span<const Matrix> y) {
  check_slices(y);
  const Matrix r = radii(y);
  ScvStatistics out;
  out.radius_sum = ordered_sum(r);
  const Index order = y[0].rows();
  out.score_cov.assign(y.size(), Matrix(order, order));
  const long work = static_cast<long>(y.size()) * static_cast<long>(order);
#pragma omp parallel for schedule(static)
  for (long w = 0; w < work; ++w) {
    const auto k = static_cast<std::size_t>(w / order);
    score_row(y[k], r, w % order, out.score_cov[k]);
  }
  return out;
}

double scv_radius_sum(std::span<const Matrix> y) {
  check_slices(y);
  return ordered_sum(radii(y));
}

double median_pairwise_distance_serial(const Matrix& x) {
  const Index n = x.cols();
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) d.push_back((x.col(i) - x.col(j)).norm());
  }
  return median_of(d);
}

double median_pairwise_distance(const Matrix& x) {
  const Index n = x.cols();
  std::vector<double> d(static_cast<std::size_t>(n * (n - 1) / 2));
  const long rows = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < rows; ++i) {
    // Offset of pair (i, i+1) in row-major upper-triangle order.
    std::size_t at = static_cast<std::size_t>(i * (2 * n - i - 1) / 2);
    for (Index j = i + 1; j < n; ++j) d[at++] = (x.col(i) - x.col(j)).norm();
  }
  return median_of(d);
}

}  // namespace ivafuse::kernels
