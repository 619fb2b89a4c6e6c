#pragma once

#include "ivafuse/dataio.hpp"
#include "ivafuse/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace ivafuse {

/// PCA data reduction fitted on training data: x_hat = F (x - mean).
/// Rows of F are the leading covariance eigenvectors, scaled by
/// eigenvalue^{-1/2} when whitened.
struct Reducer {
  std::string name;
  std::vector<std::string> feature_labels;
  Vector mean;          // d
  Matrix F;             // P x d
  Vector eigenvalues;   // P, descending
  Matrix eigenvectors;  // d x P, orthonormal columns, sign-canonical
  bool whitened = true;

  Index order() const { return F.rows(); }
  Index dim() const { return F.cols(); }
};

/// P x N x K stack of reduced datasets, one P x N slice per dataset.
struct MultisetTensor {
  std::vector<Matrix> slices;
  std::vector<std::string> names;

  Index K() const { return static_cast<Index>(slices.size()); }
  Index P() const { return slices.empty() ? 0 : slices.front().rows(); }
  Index N() const { return slices.empty() ? 0 : slices.front().cols(); }
};

namespace multiset {

/// Relative eigenvalue floor below which a direction counts as rank-deficient.
inline constexpr double kRankTolerance = 1e-12;

Reducer fit_reducer(const Matrix& x, Index order, bool whiten, std::string name = {});
Reducer fit_reducer(const FeatureTable& table, Index order, bool whiten);

/// F (X - train mean); throws on feature-dimension mismatch.
Matrix apply_reducer(const Reducer& r, const Matrix& x);

/// Moore-Penrose pseudo-inverse of F (d x P), from the stored factors.
Matrix reducer_pinv(const Reducer& r);

/// A_hat = F^+ W^{-1} (d x P); column p holds the per-feature weights of
/// estimated source p. Throws if W is numerically singular.
Matrix back_reconstruct(const Reducer& r, const Matrix& w);

/// Rows ordered SCV-major: row p*K + k holds source p of dataset k.
Matrix scv_concat(std::span<const Matrix> y);
std::vector<Matrix> scv_split(const Matrix& stacked, Index k);

FeatureTable scv_concat_table(std::span<const Matrix> y, const std::vector<std::string>& dataset_names,
                              const std::vector<std::string>& molecule_ids);

/// Stacks feature rows; labels become "<table>:<feature>". Ids must align.
FeatureTable regular_concat(std::span<const FeatureTable> tables, const std::string& name = "Regular");

MultisetTensor make_tensor(std::vector<Matrix> slices, std::vector<std::string> names);

}  // namespace multiset
}  // namespace ivafuse
