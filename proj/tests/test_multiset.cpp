#include "ivafuse/linalg.hpp"
#include "ivafuse/multiset.hpp"

#include <Eigen/QR>

#include "support.hpp"

using namespace ivafuse;
using testing_support::random_matrix;

namespace {

Matrix correlated(Index d, Index n, unsigned seed) {
  return random_matrix(d, d, seed) * random_matrix(d, n, seed + 1) +
         Vector::LinSpaced(d, 1.0, 5.0).replicate(1, n);
}

}  // namespace

TEST(Reducer, WhitenedOutputHasIdentityCovariance) {
  const Matrix x = correlated(6, 400, 1);
  const auto r = multiset::fit_reducer(x, 4, true);
  EXPECT_EQ(r.F.rows(), 4);
  EXPECT_EQ(r.F.cols(), 6);
  const Matrix y = multiset::apply_reducer(r, x);
  EXPECT_LE(y.rowwise().mean().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((linalg::sample_covariance(y) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Reducer, UnwhitenedOutputCovarianceIsEigenvalues) {
  const Matrix x = correlated(5, 300, 3);
  const auto r = multiset::fit_reducer(x, 3, false);
  const Matrix y = multiset::apply_reducer(r, x);
  const Matrix c = linalg::sample_covariance(y);
  EXPECT_LE((c - Matrix(r.eigenvalues.asDiagonal())).cwiseAbs().maxCoeff(), 1e-9 * r.eigenvalues(0));
  for (Index i = 1; i < r.eigenvalues.size(); ++i) EXPECT_GE(r.eigenvalues(i - 1), r.eigenvalues(i));
}

TEST(Reducer, AppliesTrainingMeanToNewData) {
  const Matrix x = correlated(3, 100, 5);
  const auto r = multiset::fit_reducer(x, 3, true);
  const Matrix probe = x.rowwise().mean();
  EXPECT_LE(multiset::apply_reducer(r, probe).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(multiset::apply_reducer(r, Matrix::Zero(4, 2)), Error);
}

TEST(Reducer, Errors) {
  const Matrix x = correlated(3, 50, 7);
  EXPECT_THROW(multiset::fit_reducer(x, 0, true), Error);
  EXPECT_THROW(multiset::fit_reducer(x, 4, true), Error);
  EXPECT_THROW(multiset::fit_reducer(x.leftCols(1), 1, true), Error);
  Matrix low(3, 50);
  low.row(0) = x.row(0);
  low.row(1) = 2.0 * x.row(0);
  low.row(2) = x.row(1);
  EXPECT_THROW(multiset::fit_reducer(low, 3, true), Error);
  EXPECT_NO_THROW(multiset::fit_reducer(low, 2, true));
}

TEST(Reducer, PseudoInverseMatchesOrthogonalDecomposition) {
  const Matrix x = correlated(7, 200, 9);
  for (bool whiten : {true, false}) {
    const auto r = multiset::fit_reducer(x, 4, whiten);
    const Matrix oracle = Eigen::CompleteOrthogonalDecomposition<Matrix>(r.F).pseudoInverse();
    EXPECT_LE((multiset::reducer_pinv(r) - oracle).cwiseAbs().maxCoeff(), 1e-10);
    // W = I: back-reconstruction is the pseudo-inverse itself
    EXPECT_LE((multiset::back_reconstruct(r, Matrix::Identity(4, 4)) - oracle).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Reducer, BackReconstructUsesInverse) {
  const Matrix x = correlated(5, 120, 11);
  const auto r = multiset::fit_reducer(x, 3, true);
  const Matrix w = random_matrix(3, 3, 12) + 3.0 * Matrix::Identity(3, 3);
  const Matrix a = multiset::back_reconstruct(r, w);
  EXPECT_LE((a * w - multiset::reducer_pinv(r)).cwiseAbs().maxCoeff(), 1e-10);
  Matrix singular = w;
  singular.row(2) = singular.row(1);
  EXPECT_THROW(multiset::back_reconstruct(r, singular), Error);
  EXPECT_THROW(multiset::back_reconstruct(r, Matrix::Identity(2, 2)), Error);
}

TEST(ScvConcat, ScvMajorLayoutAndSplit) {
  std::vector<Matrix> y{random_matrix(3, 4, 1), random_matrix(3, 4, 2)};
  const Matrix s = multiset::scv_concat(y);
  ASSERT_EQ(s.rows(), 6);
  for (Index p = 0; p < 3; ++p)
    for (Index k = 0; k < 2; ++k) EXPECT_EQ(s.row(p * 2 + k), y[static_cast<std::size_t>(k)].row(p));
  const auto back = multiset::scv_split(s, 2);
  EXPECT_EQ(back[0], y[0]);
  EXPECT_EQ(back[1], y[1]);
  EXPECT_THROW(multiset::scv_split(s, 4), Error);

  const auto t = multiset::scv_concat_table(y, {"A", "B"}, {"m1", "m2", "m3", "m4"});
  EXPECT_EQ(t.features[0], "scv1:A");
  EXPECT_EQ(t.features[3], "scv2:B");
}

TEST(RegularConcat, DimensionsAdd) {
  std::vector<FeatureTable> t{{"A", {"x", "y"}, random_matrix(2, 3, 1), {"a", "b", "c"}},
                              {"B", {"x"}, random_matrix(1, 3, 2), {"a", "b", "c"}}};
  const auto r = multiset::regular_concat(t);
  EXPECT_EQ(r.dim(), 3);
  EXPECT_EQ(r.features, (std::vector<std::string>{"A:x", "A:y", "B:x"}));
  EXPECT_EQ(r.data.bottomRows(1), t[1].data);
  const auto single = multiset::regular_concat(std::span(t).first(1));
  EXPECT_EQ(single.data, t[0].data);
  t[1].molecule_ids = {"c", "b", "a"};
  EXPECT_THROW(multiset::regular_concat(t), Error);
}

TEST(MakeTensor, ShapeChecks) {
  EXPECT_THROW(multiset::make_tensor({}, {}), Error);
  EXPECT_THROW(multiset::make_tensor({Matrix::Zero(2, 3), Matrix::Zero(2, 4)}, {}), Error);
  const auto t = multiset::make_tensor({Matrix::Zero(2, 3), Matrix::Zero(2, 3)}, {});
  EXPECT_EQ(t.K(), 2);
  EXPECT_EQ(t.P(), 2);
  EXPECT_EQ(t.N(), 3);
}
