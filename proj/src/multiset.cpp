#include "ivafuse/multiset.hpp"

#include "ivafuse/linalg.hpp"

#include <cmath>

namespace ivafuse::multiset {

Reducer fit_reducer(const Matrix& x, Index order, bool whiten, std::string name) {
  if (x.cols() < 2) throw Error("fit_reducer: need at least two samples");
  if (order < 1 || order > x.rows()) {
    throw Error("fit_reducer: order " + std::to_string(order) + " outside [1, " + std::to_string(x.rows()) + "]");
  }
  if (!x.allFinite()) throw Error("fit_reducer: non-finite training data");

  Reducer r;
  r.name = std::move(name);
  r.whitened = whiten;
  r.mean = x.rowwise().mean();
  const auto eig = linalg::symmetric_eigen(linalg::sample_covariance(x));
  const double lmax = eig.values(0);
  if (!(lmax > 0.0) || eig.values(order - 1) < kRankTolerance * lmax) {
    throw Error("fit_reducer: order " + std::to_string(order) + " exceeds the numerical rank of the data");
  }
  r.eigenvalues = eig.values.head(order);
  r.eigenvectors = eig.vectors.leftCols(order);
  linalg::canonicalize_signs(r.eigenvectors);
  r.F = r.eigenvectors.transpose();
  if (whiten) r.F = r.eigenvalues.cwiseInverse().cwiseSqrt().asDiagonal() * r.F;
  return r;
}

Reducer fit_reducer(const FeatureTable& table, Index order, bool whiten) {
  Reducer r = fit_reducer(table.data, order, whiten, table.name);
  r.feature_labels = table.features;
  return r;
}

Matrix apply_reducer(const Reducer& r, const Matrix& x) {
  if (x.rows() != r.dim()) {
    throw Error("apply_reducer: data has " + std::to_string(x.rows()) + " features, reducer expects " +
                std::to_string(r.dim()));
  }
  return r.F * (x.colwise() - r.mean);
}

Matrix reducer_pinv(const Reducer& r) {
  if (!r.whitened) return r.eigenvectors;
  return r.eigenvectors * r.eigenvalues.cwiseSqrt().asDiagonal();
}

Matrix back_reconstruct(const Reducer& r, const Matrix& w) {
  if (w.rows() != r.order() || w.cols() != r.order()) throw Error("back_reconstruct: W shape does not match order");
  const Eigen::PartialPivLU<Matrix> lu(w);
  // Hadamard ratio |det W| / prod ||row||: scale-free singularity measure.
  const double ratio = std::abs(lu.determinant()) / w.rowwise().norm().prod();
  if (!(ratio > 1e-12)) throw Error("back_reconstruct: demixing matrix is singular");
  return reducer_pinv(r) * lu.inverse();
}

Matrix scv_concat(std::span<const Matrix> y) {
  if (y.empty()) throw Error("scv_concat: no datasets");
  const Index p = y[0].rows();
  const Index n = y[0].cols();
  const auto k = static_cast<Index>(y.size());
  for (const auto& m : y) {
    if (m.rows() != p || m.cols() != n) throw Error("scv_concat: shape mismatch across datasets");
  }
  Matrix out(p * k, n);
  for (Index s = 0; s < p; ++s) {
    for (Index d = 0; d < k; ++d) out.row(s * k + d) = y[d].row(s);
  }
  return out;
}

std::vector<Matrix> scv_split(const Matrix& stacked, Index k) {
  if (k < 1 || stacked.rows() % k != 0) throw Error("scv_split: row count not divisible by K");
  const Index p = stacked.rows() / k;
  std::vector<Matrix> out(k, Matrix(p, stacked.cols()));
  for (Index s = 0; s < p; ++s) {
    for (Index d = 0; d < k; ++d) out[d].row(s) = stacked.row(s * k + d);
  }
  return out;
}

FeatureTable scv_concat_table(std::span<const Matrix> y, const std::vector<std::string>& dataset_names,
                              const std::vector<std::string>& molecule_ids) {
  if (dataset_names.size() != y.size()) throw Error("scv_concat: one name per dataset required");
  FeatureTable t;
  t.name = "IVA";
  t.data = scv_concat(y);
  if (t.data.cols() != static_cast<Index>(molecule_ids.size())) throw Error("scv_concat: id count mismatch");
  t.molecule_ids = molecule_ids;
  const Index p = y[0].rows();
  for (Index s = 0; s < p; ++s) {
    for (const auto& name : dataset_names) t.features.push_back("scv" + std::to_string(s + 1) + ":" + name);
  }
  return t;
}

FeatureTable regular_concat(std::span<const FeatureTable> tables, const std::string& name) {
  if (tables.empty()) throw Error("regular_concat: no tables");
  if (tables.size() == 1) return tables[0];
  FeatureTable out;
  out.name = name;
  out.molecule_ids = tables[0].molecule_ids;
  Index rows = 0;
  for (const auto& t : tables) {
    if (t.molecule_ids != out.molecule_ids) {
      throw Error("regular_concat: molecule ids of " + t.name + " are not aligned with " + tables[0].name);
    }
    rows += t.dim();
  }
  out.data.resize(rows, static_cast<Index>(out.molecule_ids.size()));
  Index at = 0;
  for (const auto& t : tables) {
    out.data.middleRows(at, t.dim()) = t.data;
    at += t.dim();
    for (const auto& f : t.features) out.features.push_back(t.name + ":" + f);
  }
  return out;
}

MultisetTensor make_tensor(std::vector<Matrix> slices, std::vector<std::string> names) {
  if (slices.empty()) throw Error("make_tensor: no slices");
  if (names.empty()) {
    for (std::size_t k = 0; k < slices.size(); ++k) names.push_back("set" + std::to_string(k + 1));
  }
  if (names.size() != slices.size()) throw Error("make_tensor: one name per slice required");
  for (const auto& s : slices) {
    if (s.rows() != slices[0].rows() || s.cols() != slices[0].cols()) throw Error("make_tensor: slice shapes differ");
    if (!s.allFinite()) throw Error("make_tensor: non-finite entry");
  }
  return {std::move(slices), std::move(names)};
}

}  // namespace ivafuse::multiset
