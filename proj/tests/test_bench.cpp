#include "ivafuse/bench.hpp"

#include <Eigen/SVD>

#include "support.hpp"

using namespace ivafuse;

namespace {

double laplace_cdf(double x) {
  const double b = 1.0 / std::sqrt(2.0);
  return x < 0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
}

double correlation(const Vector& a, const Vector& b) {
  const Vector da = a.array() - a.mean(), db = b.array() - b.mean();
  return da.dot(db) / std::sqrt(da.squaredNorm() * db.squaredNorm());
}

}  // namespace

TEST(Sampler, UnivariateLaplaceKolmogorovSmirnov) {
  const Index n = 100000;
  const auto s = bench::sample_scv_sources(1, 1, n, 0.0, 123);
  std::vector<double> v(s[0].data(), s[0].data() + n);
  std::sort(v.begin(), v.end());
  double d = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double f = laplace_cdf(v[static_cast<std::size_t>(i)]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  const double critical = std::sqrt(-0.5 * std::log(0.0005)) / std::sqrt(static_cast<double>(n));
  EXPECT_LT(d, critical);
}

TEST(Sampler, StrongCorrelationWithinScv) {
  const auto s = bench::sample_scv_sources(2, 2, 100000, 0.9, 7);
  for (Index p = 0; p < 2; ++p) {
    const double r = correlation(s[0].row(p).transpose(), s[1].row(p).transpose());
    EXPECT_GT(r, 0.8);
    EXPECT_LT(r, 1.0);
  }
  // different SCVs are uncorrelated
  EXPECT_LT(std::abs(correlation(s[0].row(0).transpose(), s[1].row(1).transpose())), 0.02);
}

TEST(Sampler, DeterministicAndValidated) {
  EXPECT_EQ(bench::sample_scv_sources(3, 2, 50, 0.5, 1)[2], bench::sample_scv_sources(3, 2, 50, 0.5, 1)[2]);
  EXPECT_NE(bench::sample_scv_sources(3, 2, 50, 0.5, 1)[0], bench::sample_scv_sources(3, 2, 50, 0.5, 2)[0]);
  EXPECT_THROW(bench::sample_scv_sources(2, 2, 10, 1.0, 1), Error);
  EXPECT_THROW(bench::sample_scv_sources(2, 2, 10, -0.1, 1), Error);
  EXPECT_THROW(bench::sample_scv_sources(2, 2, 10, 0.5, 1, true), Error);
}

TEST(Sampler, IndependentSlicesAreUncorrelated) {
  const auto s = bench::sample_scv_sources(2, 1, 100000, 0.0, 3, true);
  Vector r0 = s[0].row(0).transpose().cwiseAbs(), r1 = s[1].row(0).transpose().cwiseAbs();
  EXPECT_LT(std::abs(correlation(r0, r1)), 0.02);
}

TEST(Problem, MixingIsExactAndConditioned) {
  const auto prob = bench::make_problem(3, 5, 200, 0.5, 10.0, 99);
  ASSERT_EQ(prob.A.size(), 3u);
  for (Index k = 0; k < 3; ++k) {
    EXPECT_EQ(prob.X[k], (prob.A[k] * prob.S[k]).eval());
    Eigen::JacobiSVD<Matrix> svd(prob.A[k]);
    EXPECT_LE(svd.singularValues()(0) / svd.singularValues()(4), 10.0);
    EXPECT_NEAR(bench::condition_number(prob.A[k]), svd.singularValues()(0) / svd.singularValues()(4), 1e-12);
  }
}

TEST(Problem, ScalarMixing) {
  const auto prob = bench::make_problem(2, 1, 20, 0.3, 10.0, 5);
  for (Index k = 0; k < 2; ++k) EXPECT_EQ(prob.X[k], (prob.A[k](0, 0) * prob.S[k]).eval());
}

TEST(Problem, InfeasibleBound) {
  EXPECT_THROW(bench::make_problem(1, 6, 10, 0.0, 1.01, 5), Error);
  EXPECT_THROW(bench::make_problem(1, 2, 10, 0.0, 1.0, 5), Error);
}

TEST(Problem, OracleSeparatorScoresZero) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto prob = bench::make_problem(3, 4, 500, 0.5, 10.0, seed);
    std::vector<Matrix> eff, oracle;
    for (Index k = 0; k < 3; ++k) {
      const auto r = multiset::fit_reducer(prob.X[k], 4, true);
      eff.push_back(r.F * prob.A[k]);
      oracle.push_back(eff.back().inverse());
    }
    EXPECT_LT(iva::joint_isi(oracle, eff), 1e-10);
  }
}

TEST(Recovery, IdentityMixingNearOracle) {
  bench::SyntheticProblem prob;
  prob.K = 2;
  prob.P = 3;
  prob.N = 5000;
  prob.S = bench::sample_scv_sources(2, 3, 5000, 0.5, 17);
  for (const auto& s : prob.S) {
    prob.A.push_back(Matrix::Identity(3, 3));
    prob.X.push_back(s);
  }
  const auto rec = bench::recovery_experiment(prob, IvaOptions{}, bench::Mode::Iva);
  EXPECT_LE(rec.jisi, 0.02);
}

TEST(Recovery, ModeParsing) {
  EXPECT_EQ(bench::parse_mode("iva"), bench::Mode::Iva);
  EXPECT_EQ(bench::to_string(bench::Mode::Ica), "ica");
  EXPECT_THROW(bench::parse_mode("pca"), Error);
}
