#pragma once

#include "ivafuse/types.hpp"

#include <span>
#include <vector>

// Data-parallel inner loops. Each OpenMP kernel has a *_serial twin that
// performs the identical arithmetic in the identical order; tests require the
// two to agree bit for bit, and the benchmark target times them side by side.
namespace ivafuse::kernels {

/// Guard on the SCV radius in the Laplacian score y / max(r, eps).
inline constexpr double kRadiusEpsilon = 1e-12;

/// K(a, b)_ij = exp(-||a_i - b_j||^2 / (2 sigma^2)) for columns a_i, b_j.
Matrix gaussian_kernel(const Matrix& a, const Matrix& b, double sigma);
Matrix gaussian_kernel_serial(const Matrix& a, const Matrix& b, double sigma);

/// Sufficient statistics of one IVA-L iteration for source estimates
/// y[k] (P x N each):
///   radius_sum = sum_n sum_p r_p(n),  r_p(n) = sqrt(sum_k y[k](p,n)^2)
///   score_cov[k] = (1/N) Phi[k] y[k]^T, Phi[k](p,n) = y[k](p,n) / max(r_p(n), eps)
struct ScvStatistics {
  double radius_sum = 0.0;
  std::vector<Matrix> score_cov;
};

ScvStatistics scv_statistics(std::span<const Matrix> y);
ScvStatistics scv_statistics_serial(std::span<const Matrix> y);

/// Only the radius sum (the data term of the IVA-L cost).
double scv_radius_sum(std::span<const Matrix> y);

/// Median Euclidean distance over all unordered column pairs of x.
double median_pairwise_distance(const Matrix& x);
double median_pairwise_distance_serial(const Matrix& x);

}  // namespace ivafuse::kernels
